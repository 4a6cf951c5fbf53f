// stickel: compute Stickelberger elements, run the identity checks, drive the simulator.
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.

#include "stickel/stickel.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using json = nlohmann::ordered_json;
using namespace stickel;

namespace {

struct Globals {
  bool json = false;
  bool timing = false;
  std::uint64_t seed = 1;
  bool seed_given = false;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string argv_echo;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::int64_t> parse_ints(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      long long v = std::stoll(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("expected a comma-separated integer list, got '" + s + "'");
    }
  }
  return out;
}

json check_json(const CheckReport& c, const std::string& repro) {
  json j;
  j["name"] = c.name;
  j["status"] = c.status();
  j["checked"] = c.checked;
  j["failed"] = c.failed;
  if (!c.note.empty()) j["note"] = c.note;
  if (!c.witnesses.empty()) j["witnesses"] = c.witnesses;
  if (c.applicable && !c.pass) j["repro"] = repro;
  return j;
}

// Prints the report and returns the exit code.
int emit(const Globals& g, const std::string& command, const json& params, const std::vector<CheckReport>& checks, double seconds) {
  bool ok = true;
  for (auto& c : checks) ok = ok && (!c.applicable || c.pass);
  std::string repro = g.argv_echo + (g.seed_given ? "" : " --seed " + std::to_string(g.seed));
  if (g.json) {
    json j;
    j["command"] = command;
    j["parameters"] = params;
    j["seed"] = g.seed;
    j["checks"] = json::array();
    for (auto& c : checks) j["checks"].push_back(check_json(c, repro));
    j["status"] = ok ? "PASS" : "FAIL";
    if (g.timing) j["seconds"] = seconds;
    std::cout << j.dump(2) << "\n";
  } else {
    for (auto& c : checks) {
      std::cout << c.status() << "  " << c.name << " (" << c.checked << " checked";
      if (c.failed) std::cout << ", " << c.failed << " failed";
      std::cout << ")";
      if (!c.note.empty()) std::cout << "  [" << c.note << "]";
      std::cout << "\n";
      for (auto& w : c.witnesses) std::cout << "    " << w << "\n";
      if (c.applicable && !c.pass) std::cout << "    repro: " << repro << "\n";
    }
    std::cout << (ok ? "PASS" : "FAIL");
    if (g.timing) std::cout << "  " << seconds << " s";
    std::cout << "\n";
  }
  return ok ? 0 : 1;
}

AbelianFieldQ field_from(std::int64_t f, const std::string& subgroup) {
  if (f < 1) throw UsageError("--f must be positive");
  return AbelianFieldQ::make_field(f, parse_ints(subgroup));
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  for (int i = 0; i < argc; ++i) g.argv_echo += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Higher Stickelberger elements: exact computation, identity checks and splitting simulations"};
  app.require_subcommand(1);
  app.add_flag("--json", g.json, "machine-readable JSON output");
  app.add_flag("--timing", g.timing, "report wall-clock time");
  auto* seed_opt = app.add_option("--seed", g.seed, "seed for randomized suites");
  app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);

  // theta
  std::int64_t t_f = 0, t_modulus = 0;
  std::string t_subgroup, t_b, t_table;
  int t_n = 0;
  bool t_csv = false;
  auto* theta_cmd = app.add_subcommand("theta", "Theta_n(b, f) over G(F/K)");
  theta_cmd->add_option("--f", t_f, "modulus f of Q(mu_f)");
  theta_cmd->add_option("--subgroup", t_subgroup, "generators of H, F = Q(mu_f)^H (comma separated)");
  theta_cmd->add_option("--modulus", t_modulus, "zeta modulus (default f)");
  theta_cmd->add_option("--b", t_b, "auxiliary integer b, or a class label with --table")->required();
  theta_cmd->add_option("--n", t_n, "twist n >= 0")->required();
  theta_cmd->add_option("--table", t_table, "ingested zeta table for general K");
  theta_cmd->add_flag("--csv", t_csv, "label,coefficient lines");

  // zeta
  std::int64_t z_f = 0, z_a = 0;
  int z_n = 0;
  std::string z_out;
  auto* zeta_cmd = app.add_subcommand("zeta", "partial zeta values zeta_f(a, -n)");
  zeta_cmd->add_option("--f", z_f, "modulus f >= 2")->required();
  zeta_cmd->add_option("--n", z_n, "n >= 0")->required();
  auto* z_a_opt = zeta_cmd->add_option("--a", z_a, "single class a");
  zeta_cmd->add_option("--table-out", z_out, "write the zeta-table document for n = 0..n");

  // wn
  std::int64_t w_f = 1;
  std::string w_subgroup;
  int w_nn = 1;
  bool w_brute = false;
  auto* wn_cmd = app.add_subcommand("wn", "w_n(F)");
  wn_cmd->add_option("--f", w_f, "modulus f of Q(mu_f)");
  wn_cmd->add_option("--subgroup", w_subgroup, "generators of H");
  wn_cmd->add_option("--n", w_nn, "n >= 1")->required();
  wn_cmd->add_flag("--brute", w_brute, "also search directly up to the stopping bound");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run an identity suite");
  verify_cmd->require_subcommand(1);
  int v_fmax = 40, v_n = 4, v_qmax = 9, v_k = 2, v_count = 200, v_m = 0;
  std::int64_t v_f = 0;
  std::string v_b = "7,11,13", v_l = "3,5", v_fs = "1,4,5", v_modulus = "full", v_qf = "2,3", v_qm = "1,2,3";
  int fmax_restr = 120, fmax_int = 40, fmax_cong = 40, fmax_chars = 40, fmax_dist = 30;
  auto add_range = [&](CLI::App* c, int& fmax) {
    c->add_option("--fmax", fmax, "largest modulus")->capture_default_str();
    c->add_option("--f", v_f, "single modulus instead of a sweep");
    c->add_option("--n", v_n, "largest twist (single twist with --f)");
    c->add_option("--b", v_b, "auxiliary integers");
  };
  auto* v_restr = verify_cmd->add_subcommand("conductor-restriction", "restriction of Theta between conductors");
  add_range(v_restr, fmax_restr);
  auto* v_int = verify_cmd->add_subcommand("integrality", "denominators of Delta supported on Nb");
  add_range(v_int, fmax_int);
  auto* v_cong = verify_cmd->add_subcommand("congruence", "Delta^(n) against twisted Delta^(m) mod w");
  add_range(v_cong, fmax_cong);
  v_cong->add_option("--m", v_m, "lower twist, -1 for every m < n")->capture_default_str();
  v_cong->add_option("--modulus", v_modulus, "full | f-part")->check(CLI::IsMember({"full", "f-part"}));
  auto* v_chars = verify_cmd->add_subcommand("characters", "character values against generalized Bernoulli numbers");
  add_range(v_chars, fmax_chars);
  auto* v_dist = verify_cmd->add_subcommand("distribution", "distribution relation of partial zeta values");
  v_dist->add_option("--fmax", fmax_dist, "largest modulus")->capture_default_str();
  v_dist->add_option("--n", v_n);
  v_dist->add_option("--l", v_l, "auxiliary primes");
  auto* v_tower = verify_cmd->add_subcommand("tower", "restriction along F(mu_{l^k})");
  v_tower->add_option("--fs", v_fs, "base moduli");
  v_tower->add_option("--l", v_l, "odd primes");
  v_tower->add_option("--n", v_n);
  v_tower->add_option("--k", v_k, "levels 0..k-1");
  v_tower->add_option("--b", v_b);
  auto* v_quillen = verify_cmd->add_subcommand("quillen", "K-groups of finite fields, exhaustive");
  v_quillen->add_option("--qmax", v_qmax, "prime powers q <= qmax");
  v_quillen->add_option("--fdeg", v_qf, "extension degrees");
  v_quillen->add_option("--m", v_qm, "K-theory indices");
  auto* v_wn = verify_cmd->add_subcommand("wn", "spot values of w_n by direct search");
  auto* v_example = verify_cmd->add_subcommand("example", "worked Stickelberger example");
  auto* v_split = verify_cmd->add_subcommand("splitting", "random splitting-lemma sequences");
  v_split->add_option("--count", v_count, "number of sequences");

  // simulate
  std::string s_spec, s_suite = "splitting";
  bool s_swap = false;
  int s_factors = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "run a localization scenario or Euler family");
  sim_cmd->add_option("--spec", s_spec, "scenario spec file")->required();
  sim_cmd->add_option("--suite", s_suite, "splitting | euler")->check(CLI::IsMember({"splitting", "euler"}));
  sim_cmd->add_flag("--swap-twist", s_swap, "exchange m and n in the Euler factors (negative control)");
  sim_cmd->add_option("--max-factors", s_factors, "primes per layer conductor L")->check(CLI::Range(1, 3));

  // ingest-check
  std::string i_table, i_b;
  auto* ingest_cmd = app.add_subcommand("ingest-check", "validate a zeta-table document");
  ingest_cmd->add_option("--table", i_table, "table file")->required();
  ingest_cmd->add_option("--b", i_b, "class label of b: also run integrality and congruences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  g.seed_given = seed_opt->count() > 0;
  auto t0 = std::chrono::steady_clock::now();

  try {
    if (*theta_cmd) {
      StickContext ctx;
      std::string desc;
      if (!t_table.empty()) {
        auto table = std::make_shared<const PartialZetaTable>(load_zeta_table(read_file(t_table)));
        ctx = make_context(table, t_b, t_n);
        desc = table->description();
      } else {
        if (t_f < 1) throw UsageError("--f is required without --table");
        auto field = field_from(t_f, t_subgroup);
        ctx = make_context_q(field, t_modulus ? t_modulus : t_f, parse_ints(t_b).at(0), t_n);
        desc = field.description();
      }
      QGroupRing th = theta(ctx);
      if (g.json) {
        json j;
        j["command"] = "theta";
        j["field"] = desc;
        j["b"] = t_b;
        j["n"] = t_n;
        json co = json::object();
        for (int i = 0; i < th.size(); ++i) co[th.group()->label(i)] = th[i].str();
        j["coefficients"] = co;
        std::cout << j.dump(2) << "\n";
      } else if (t_csv) {
        std::cout << "label,coefficient\n";
        for (int i = 0; i < th.size(); ++i) std::cout << th.group()->label(i) << "," << th[i].str() << "\n";
      } else {
        std::cout << th.str() << "\n";
      }
      return 0;
    }

    if (*zeta_cmd) {
      if (z_f < 2) throw UsageError("--f must be >= 2");
      if (z_n < 0) throw UsageError("--n must be >= 0");
      if (!z_out.empty()) {
        std::ofstream out(z_out);
        if (!out) throw UsageError("cannot write " + z_out);
        out << format_table(build_table_q(z_f, z_n));
      }
      json j;
      j["command"] = "zeta";
      j["f"] = z_f;
      j["n"] = z_n;
      json vals = json::object();
      std::vector<std::int64_t> as = z_a_opt->count() ? std::vector<std::int64_t>{z_a} : unit_group(z_f);
      for (auto a : as) {
        Rational v = zeta_q(z_f, a, z_n);
        vals[std::to_string(a)] = v.str();
        if (!g.json) std::cout << "zeta_" << z_f << "(" << a << ", -" << z_n << ") = " << v.str() << "\n";
      }
      j["values"] = vals;
      if (g.json) std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*wn_cmd) {
      auto field = field_from(w_f, w_subgroup);
      BigInt w = w_n(field, w_nn);
      json j;
      j["command"] = "wn";
      j["field"] = field.description();
      j["n"] = w_nn;
      j["w"] = w.str();
      std::vector<CheckReport> checks;
      if (w_brute) {
        std::int64_t bound = w_n_search_bound(field, w_nn);
        std::int64_t b = w_n_bruteforce(field, w_nn, bound);
        j["search_bound"] = bound;
        j["search"] = b;
        CheckReport r;
        r.name = "direct search agrees";
        if (BigInt(b) == w) r.ok();
        else r.fail("search up to " + std::to_string(bound) + " gives " + std::to_string(b) + ", formula gives " + w.str());
        checks.push_back(r);
      }
      if (g.json) {
        for (auto& c : checks) j["checks"].push_back(check_json(c, g.argv_echo));
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "w_" << w_nn << "(" << field.description() << ") = " << w.str() << "\n";
        if (w_brute) std::cout << "direct search up to " << j["search_bound"] << ": " << j["search"] << "\n";
      }
      for (auto& c : checks)
        if (!c.pass) return 1;
      return 0;
    }

    if (*verify_cmd) {
      auto bs = parse_ints(v_b);
      std::vector<CheckReport> checks;
      json params;
      params["b"] = bs;
      auto one_or_sweep = [&](const std::function<CheckReport(std::int64_t, int)>& single, const std::function<CheckReport()>& sweep) {
        if (v_f) {
          params["f"] = v_f;
          params["n"] = v_n;
          checks.push_back(single(v_f, v_n));
        } else {
          params["fmax"] = v_fmax;
          params["nmax"] = v_n;
          checks.push_back(sweep());
        }
      };
      std::string which;
      if (*v_restr) {
        which = "conductor-restriction";
        v_fmax = fmax_restr;
        one_or_sweep(
            [&](std::int64_t f, int n) {
              CheckReport r;
              r.name = "conductor restriction";
              for (auto d : divisors(f))
                for (auto b : coprime_bs(bs, f))
                  if (d >= 2) {
                    auto s = conductor_restriction_sides(f, d, b, n);
                    if (s.equal()) r.ok();
                    else r.fail("f'=" + std::to_string(f) + " f=" + std::to_string(d) + " b=" + std::to_string(b) + ": " + s.lhs.str() +
                                " vs " + s.rhs.str());
                  }
              return r;
            },
            [&] { return sweep_conductor_restriction(v_fmax, v_n, bs, g.jobs); });
      } else if (*v_int) {
        which = "integrality";
        v_fmax = fmax_int;
        one_or_sweep(
            [&](std::int64_t f, int n) {
              CheckReport r;
              for (auto b : coprime_bs(bs, f)) r.merge(check_integrality(make_context_q(AbelianFieldQ::cyclotomic(f), f, b, n)));
              r.name = "integrality";
              return r;
            },
            [&] { return sweep_integrality(v_fmax, v_n, bs, g.jobs); });
      } else if (*v_cong) {
        which = "congruence";
        v_fmax = fmax_cong;
        auto mod = v_modulus == "full" ? CongruenceModulus::full : CongruenceModulus::f_supported;
        params["modulus"] = v_modulus;
        one_or_sweep(
            [&](std::int64_t f, int n) {
              std::vector<CheckReport> parts;
              for (auto b : bs)
                for (int m = 0; m < n; ++m) {
                  if (v_m >= 0 && m != v_m) continue;
                  if (gcd64(b, f) != 1) throw UsageError("b = " + std::to_string(b) + " is not coprime to f = " + std::to_string(f));
                  auto r = check_congruence(make_context_q(AbelianFieldQ::cyclotomic(f), f, b, n), n, m, mod);
                  if (!r.applicable) r.note = "b=" + std::to_string(b) + " m=" + std::to_string(m) + ": " + r.note + "; not applicable";
                  parts.push_back(r);
                }
              auto r = merge_all(parts, "congruence");
              for (auto& p : parts)
                if (!p.applicable) r.note += (r.note.empty() ? "" : "; ") + p.note;
              return r;
            },
            [&] { return sweep_congruence(v_fmax, v_n, bs, mod, g.jobs, v_m); });
      } else if (*v_chars) {
        which = "characters";
        v_fmax = fmax_chars;
        one_or_sweep(
            [&](std::int64_t f, int n) {
              CheckReport r;
              for (auto b : coprime_bs(bs, f)) r.merge(character_check(make_context_q(AbelianFieldQ::cyclotomic(f), f, b, n)));
              r.name = "character values";
              return r;
            },
            [&] { return sweep_characters(v_fmax, v_n, bs, g.jobs); });
      } else if (*v_dist) {
        which = "distribution";
        v_fmax = fmax_dist;
        params = {{"fmax", v_fmax}, {"nmax", v_n}, {"l", parse_ints(v_l)}};
        checks.push_back(sweep_distribution(v_fmax, v_n, parse_ints(v_l), g.jobs));
      } else if (*v_tower) {
        which = "tower";
        auto ls = parse_ints(v_l);
        for (auto l : ls)
          if (l == 2 || !is_prime(l)) throw UsageError("tower restriction needs odd primes l");
        params = {{"fs", parse_ints(v_fs)}, {"l", ls}, {"nmax", v_n}, {"k", v_k}, {"b", bs}};
        checks.push_back(sweep_tower(parse_ints(v_fs), v_n, ls, v_k, bs, g.jobs));
      } else if (*v_quillen) {
        which = "quillen";
        std::vector<std::int64_t> qs;
        for (std::int64_t q = 2; q <= v_qmax; ++q)
          if (is_prime_power(q)) qs.push_back(q);
        std::vector<int> fs, ms;
        for (auto x : parse_ints(v_qf)) fs.push_back(static_cast<int>(x));
        for (auto x : parse_ints(v_qm)) ms.push_back(static_cast<int>(x));
        params = {{"q", qs}, {"f", fs}, {"m", ms}};
        checks.push_back(quillen_suite(qs, fs, ms, g.jobs));
      } else if (*v_wn) {
        which = "wn";
        checks.push_back(wn_values_check());
      } else if (*v_example) {
        which = "example";
        checks.push_back(worked_example_check());
      } else if (*v_split) {
        which = "splitting";
        params = {{"count", v_count}};
        checks.push_back(splitting_property_suite(v_count, g.seed, g.jobs));
      }
      return emit(g, "verify " + which, params, checks, since(t0));
    }

    if (*sim_cmd) {
      ScenarioSpec spec = parse_scenario_spec(read_file(s_spec));
      if (g.seed_given) spec.seed = g.seed;
      else g.seed = spec.seed;
      g.seed_given = true;
      json params;
      params["spec"] = format_scenario_spec(spec);
      params["suite"] = s_suite;
      if (s_swap) params["swap_twist"] = true;
      std::vector<CheckReport> checks;
      if (s_suite == "splitting") {
        if (s_swap) throw UsageError("--swap-twist applies to --suite euler");
        LocalizationScenario sc(spec);
        checks = run_scenario(sc).checks;
      } else {
        EulerFamily fam(spec, s_factors);
        std::vector<std::int64_t> ls = fam.conductors();
        params["layers"] = ls;
        checks = run_family(fam, s_swap).checks;
      }
      return emit(g, "simulate", params, checks, since(t0));
    }

    if (*ingest_cmd) {
      std::vector<CheckReport> checks;
      CheckReport load;
      load.name = "document loads";
      std::shared_ptr<const PartialZetaTable> table;
      try {
        table = std::make_shared<const PartialZetaTable>(load_zeta_table(read_file(i_table)));
        load.ok();
      } catch (const GroupAxiomError& e) {
        load.fail(std::string("group axioms: ") + e.what());
      } catch (const TableIncompleteError& e) {
        load.fail(std::string("completeness: ") + e.what());
      } catch (const ParseError& e) {
        load.fail(std::string("format: ") + e.what());
      }
      checks.push_back(load);
      json params = {{"table", i_table}};
      if (table && !i_b.empty()) {
        params["b"] = i_b;
        CheckReport integ;
        integ.name = "integrality";
        for (int n : table->twists()) integ.merge(check_integrality(make_context(table, i_b, n)));
        checks.push_back(integ);
        auto ns = table->twists();
        std::vector<CheckReport> parts;
        for (std::size_t i = 0; i < ns.size(); ++i)
          for (std::size_t j = 0; j < i; ++j)
            if (ns[j] >= 1 && table->w_value(ns[j]) && table->w_value(ns[i] + 1))
              parts.push_back(check_congruence(make_context(table, i_b, ns[i]), ns[i], ns[j]));
        if (!parts.empty()) checks.push_back(merge_all(parts, "congruence (supplied w values)"));
      }
      return emit(g, "ingest-check", params, checks, since(t0));
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
