// Acceptance runner: one PASS/FAIL line per criterion, details indented below it.
// Usage: acceptance [--jobs N] [--expect-fail i,j,...]
// Exit code 0 when the set of failing criteria equals the --expect-fail list (empty by default).

#include "stickel/stickel.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

using namespace stickel;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::set<int> g_failed;

void line(int id, const std::string& what, bool pass, double secs, double limit) {
  bool in_time = limit <= 0 || secs < limit;
  bool ok = pass && in_time;
  if (!ok) g_failed.insert(id);
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << what << "  (" << std::fixed << std::setprecision(2) << secs << " s";
  if (limit > 0) std::cout << ", limit " << limit << " s";
  std::cout << ")\n";
  if (pass && !in_time) std::cout << "    over the time limit\n";
}

void show(const CheckReport& r) {
  std::cout << "    " << r.status() << " " << r.name << ": " << r.checked << " checked";
  if (r.failed) std::cout << ", " << r.failed << " failed";
  if (!r.note.empty()) std::cout << "  [" << r.note << "]";
  std::cout << "\n";
  int shown = 0;
  for (auto& w : r.witnesses)
    if (shown++ < 4) std::cout << "      " << w << "\n";
}

bool ok(const CheckReport& r) { return r.applicable && r.pass; }

}  // namespace

int main(int argc, char** argv) {
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::set<int> expected;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--jobs" && i + 1 < argc) jobs = std::max(1, std::atoi(argv[++i]));
    else if (a == "--expect-fail" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) expected.insert(std::atoi(item.c_str()));
    } else {
      std::cerr << "usage: acceptance [--jobs N] [--expect-fail i,j,...]\n";
      return 2;
    }
  }
  const std::vector<std::int64_t> bs{7, 11, 13};
  std::cout << "acceptance run, " << jobs << " worker threads\n";

  {
    auto t0 = Clock::now();
    auto r = worked_example_check();
    double s = since(t0);
    line(1, "worked Stickelberger example at conductors 4 and 12", ok(r), s, 1);
    show(r);
  }
  {
    auto t0 = Clock::now();
    auto r = sweep_conductor_restriction(120, 4, bs, jobs);
    double s = since(t0);
    line(2, "conductor restriction, f' <= 120, f | f', n <= 4", ok(r), s, 120);
    show(r);
  }
  {
    auto t0 = Clock::now();
    auto r = sweep_characters(40, 4, bs, jobs);
    double s = since(t0);
    line(3, "character values against generalized Bernoulli numbers, f <= 40, n <= 4", ok(r), s, 0);
    show(r);
  }
  {
    auto t0 = Clock::now();
    auto integ = sweep_integrality(40, 4, bs, jobs);
    auto full = sweep_congruence(40, 4, bs, CongruenceModulus::full, jobs, 0);
    double s = since(t0);
    auto fpart = sweep_congruence(40, 4, bs, CongruenceModulus::f_supported, jobs, 0);
    line(4, "integrality of Delta and the congruence mod w_n(Q(mu_f)), f <= 40, n <= 4", ok(integ) && ok(full), s, 0);
    show(integ);
    show(full);
    if (full.checked)
      std::cout << "    congruence holds for " << (full.checked - full.failed) << " of " << full.checked << " classes ("
                << std::setprecision(1) << 100.0 * (full.checked - full.failed) / full.checked << "%)\n";
    std::cout << "    informational, same sweep at the part of w_n supported on primes dividing f:\n";
    show(fpart);
  }
  {
    auto t0 = Clock::now();
    auto r = wn_values_check();
    double s = since(t0);
    line(5, "w_1(Q) = 2, w_2(Q) = 24, w_1(Q(i)) = 4 by bounded search", ok(r), s, 5);
    show(r);
  }
  {
    auto t0 = Clock::now();
    auto r = quillen_suite({2, 3, 4, 5, 7, 8, 9}, {2, 3}, {1, 2, 3}, jobs);
    double s = since(t0);
    line(6, "K-groups of finite fields: transfer, inclusion and Frobenius identities", ok(r), s, 30);
    show(r);
  }
  {
    auto t0 = Clock::now();
    auto r = splitting_property_suite(200, 1, jobs);
    double s = since(t0);
    line(7, "splitting lemma contracts and annihilation, 200 seeded sequences", ok(r), s, 0);
    show(r);
  }
  {
    auto t0 = Clock::now();
    bool pass = true;
    // 50 seeded scenarios
    std::vector<std::function<CheckReport()>> tasks;
    std::vector<ScenarioSpec> specs;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) specs.push_back(random_scenario_spec(seed));
    std::vector<int> gamma_nontrivial(specs.size(), 0);
    std::vector<std::vector<CheckReport>> results(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i)
      tasks.push_back([&, i] {
        CheckReport r;
        try {
          auto sc = build_stable_scenario(specs[i]);
          int km = sc.k_max();
          gamma_nontrivial[i] = !(sc.gamma(km) == ZnGroupRing::scalar(sc.g0(), 1, ResidueRing{ipow(sc.spec().l, km)}));
          results[i] = run_scenario(sc).checks;
          for (auto& c : results[i]) {
            r.merge(c);
            if (c.applicable && !c.pass) r.pass = false;
          }
          if (!r.pass && r.witnesses.empty()) r.witnesses.push_back(sc.repro());
        } catch (const std::exception& e) {
          r.fail("seed " + std::to_string(specs[i].seed) + ": " + e.what());
        }
        return r;
      });
    auto parts = run_parallel(tasks, jobs);
    std::map<std::string, CheckReport> by_name;
    for (auto& res : results)
      for (auto& c : res) {
        auto& b = by_name[c.name];
        b.name = c.name;
        if (c.applicable) b.merge(c);
      }
    int passed = 0, twisted = 0, gam = 0;
    std::set<int> gaps;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      passed += ok(parts[i]);
      twisted += specs[i].twisted;
      gam += gamma_nontrivial[i];
      gaps.insert(specs[i].n - specs[i].m);
    }
    pass = pass && passed == static_cast<int>(specs.size());
    std::ostringstream mix;
    mix << "    scenarios: " << passed << "/" << specs.size() << " pass; " << twisted << " twisted, " << specs.size() - twisted
        << " split; " << gam << " with gamma_l != 1 at the top level; n - m in {";
    for (auto g : gaps) mix << (g == *gaps.begin() ? "" : ",") << g;
    mix << "}\n";
    std::vector<CheckReport> shown;
    for (auto& [_, b] : by_name) shown.push_back(b);
    for (auto& p : parts)
      if (!ok(p)) shown.push_back(p);

    // engineered nontrivial divisible part
    ScenarioSpec eng;
    eng.f = 1;
    eng.l = 3;
    eng.b = 17;
    eng.p = 7;
    eng.m = 1;
    eng.n = 1;
    eng.k_max = 2;
    eng.engineer_divisible = true;
    eng.seed = 3;
    CheckReport engr;
    engr.name = "engineered divisible case";
    try {
      auto sc = build_stable_scenario(eng);
      for (auto& c : run_scenario(sc).checks) engr.merge(c);
    } catch (const std::exception& e) {
      engr.fail(e.what());
    }
    pass = pass && ok(engr);

    // two-layer Euler families
    std::vector<std::function<CheckReport()>> ftasks;
    for (auto& fs : acceptance_family_specs())
      ftasks.push_back([fs] {
        CheckReport r;
        try {
          EulerFamily fam(fs);
          auto rep = run_family(fam);
          for (auto& c : rep.checks)
            if (c.applicable) r.merge(c);
          if (fam.edges().empty()) r.fail("family has no edges: " + fam.layer(1).scenario.repro());
        } catch (const std::exception& e) {
          r.fail(e.what());
        }
        return r;
      });
    auto fam_parts = run_parallel(ftasks, jobs);
    auto fam = merge_all(fam_parts, "Euler families: transfer, reduction, boundary and norm relations");
    pass = pass && ok(fam);

    // mutation controls: both must fail
    ScenarioSpec bad = specs.front();
    bad.corrupt_transfer = true;
    CheckReport corrupt;
    corrupt.name = "corrupted transfer control";
    try {
      auto sc = build_stable_scenario(bad);
      corrupt.note = sc.repro() + " corrupt_transfer";
      for (auto& c : run_scenario(sc).checks)
        if (c.applicable) corrupt.merge(c);
    } catch (const std::exception& e) {
      corrupt.fail(std::string("exception: ") + e.what());
    }
    CheckReport swapped;
    swapped.name = "swapped Euler-factor twist control";
    try {
      EulerFamily f(acceptance_family_specs().front());
      for (auto& c : run_family(f, true).checks)
        if (c.applicable) swapped.merge(c);
    } catch (const std::exception& e) {
      swapped.fail(std::string("exception: ") + e.what());
    }
    bool controls = !corrupt.pass && !corrupt.witnesses.empty() && !swapped.pass && !swapped.witnesses.empty();
    pass = pass && controls;

    double s = since(t0);
    line(8, "localization simulator and Euler families, 50 seeded scenarios plus controls", pass, s, 600);
    std::cout << mix.str();
    for (auto& r : shown) show(r);
    show(engr);
    show(fam);
    std::cout << "    mutation controls " << (controls ? "fail as required" : "did NOT fail") << ":\n";
    show(corrupt);
    show(swapped);
  }

  std::cout << (g_failed.empty() ? "PASS" : "FAIL") << "  " << (8 - g_failed.size()) << "/8 criteria pass\n";
  if (!expected.empty()) {
    std::cout << "expected failures:";
    for (int i : expected) std::cout << " " << i;
    std::cout << (g_failed == expected ? ", matched" : ", NOT matched") << "\n";
  }
  return g_failed == expected ? 0 : 1;
}
