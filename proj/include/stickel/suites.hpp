#pragma once

// Parameter sweeps shared by the command-line tool and the acceptance runner.

#include "stickel/euler_system.hpp"
#include "stickel/finite_field_k.hpp"
#include "stickel/module_splitting.hpp"
#include "stickel/partial_zeta.hpp"
#include "stickel/splitting_sim.hpp"
#include "stickel/stickelberger.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace stickel {

// Runs tasks[i] on up to `jobs` threads; results come back in task order.
inline std::vector<CheckReport> run_parallel(const std::vector<std::function<CheckReport()>>& tasks, int jobs) {
  std::vector<CheckReport> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        out[i] = tasks[i]();
      } catch (const std::exception& e) {
        out[i].fail(std::string("exception: ") + e.what());
      }
    }
  };
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

inline CheckReport merge_all(const std::vector<CheckReport>& parts, const std::string& name) {
  CheckReport r;
  r.name = name;
  bool any = false;
  for (auto& p : parts) {
    if (!p.applicable) continue;
    any = true;
    r.merge(p);
  }
  if (!any && !parts.empty()) r.applicable = false;
  return r;
}

inline std::vector<std::int64_t> coprime_bs(const std::vector<std::int64_t>& bs, std::int64_t f) {
  std::vector<std::int64_t> out;
  for (auto b : bs)
    if (gcd64(b, f) == 1) out.push_back(b);
  return out;
}

// Theta_1(7,4), Theta_1(7,12) and the restriction between them.
inline CheckReport worked_example_check() {
  CheckReport r;
  r.name = "worked example";
  auto q4 = AbelianFieldQ::cyclotomic(4), q12 = AbelianFieldQ::cyclotomic(12);
  QGroupRing t4 = theta(make_context_q(q4, 4, 7, 1));
  QGroupRing t12 = theta(make_context_q(q12, 12, 7, 1));
  auto expect = [&](const QGroupRing& x, const AbelianFieldQ& f, const std::vector<std::pair<std::int64_t, long>>& vals, const std::string& what) {
    bool ok = true;
    for (auto [a, v] : vals) ok = ok && x[f.artin_symbol(a)] == Rational(v);
    if (ok) r.ok();
    else r.fail(what + " = " + x.str());
  };
  expect(t4, q4, {{1, 2}, {3, 2}}, "Theta_1(7,4)");
  expect(t12, q12, {{1, -27}, {5, 23}, {7, 23}, {11, -27}}, "Theta_1(7,12)");
  QGroupRing res = t12.push_forward(q4.galois_group(), restriction_map(q12, q4));
  expect(res, q4, {{1, -4}, {3, -4}}, "Res Theta_1(7,12)");
  QGroupRing eu = euler_factor_q(q4, 3, 1) * t4;
  if (eu == res) r.ok();
  else r.fail("(1 - 3 sigma_3^{-1}) Theta_1(7,4) = " + eu.str() + " vs restriction " + res.str());
  return r;
}

// Restriction from conductor f' to f against the product of Euler factors, for every f | f', f >= 2.
inline CheckReport sweep_conductor_restriction(int f_max, int n_max, const std::vector<std::int64_t>& bs, int jobs) {
  std::vector<std::function<CheckReport()>> tasks;
  for (std::int64_t fb = 2; fb <= f_max; ++fb)
    tasks.push_back([=] {
      CheckReport r;
      for (auto f : divisors(fb)) {
        if (f < 2) continue;
        for (int n = 0; n <= n_max; ++n)
          for (auto b : coprime_bs(bs, fb)) {
            if (verify_conductor_restriction(fb, f, b, n)) r.ok();
            else {
              auto s = conductor_restriction_sides(fb, f, b, n);
              r.fail("f'=" + std::to_string(fb) + " f=" + std::to_string(f) + " b=" + std::to_string(b) + " n=" + std::to_string(n) +
                     ": " + s.lhs.str() + " vs " + s.rhs.str());
            }
          }
      }
      return r;
    });
  return merge_all(run_parallel(tasks, jobs), "conductor restriction");
}

inline CheckReport sweep_characters(int f_max, int n_max, const std::vector<std::int64_t>& bs, int jobs) {
  std::vector<std::function<CheckReport()>> tasks;
  for (std::int64_t f = 2; f <= f_max; ++f)
    for (int n = 0; n <= n_max; ++n)
      for (auto b : coprime_bs(bs, f))
        tasks.push_back([=] { return character_check(make_context_q(AbelianFieldQ::cyclotomic(f), f, b, n)); });
  return merge_all(run_parallel(tasks, jobs), "character values");
}

inline CheckReport sweep_integrality(int f_max, int n_max, const std::vector<std::int64_t>& bs, int jobs) {
  std::vector<std::function<CheckReport()>> tasks;
  for (std::int64_t f = 2; f <= f_max; ++f)
    for (int n = 0; n <= n_max; ++n)
      for (auto b : coprime_bs(bs, f))
        tasks.push_back([=] { return check_integrality(make_context_q(AbelianFieldQ::cyclotomic(f), f, b, n)); });
  return merge_all(run_parallel(tasks, jobs), "integrality");
}

// Lower twist m against every n in 1..n_max with m < n; m < 0 runs every pair.
inline CheckReport sweep_congruence(int f_max, int n_max, const std::vector<std::int64_t>& bs, CongruenceModulus which, int jobs,
                                    int m_only = 0) {
  std::vector<std::function<CheckReport()>> tasks;
  for (std::int64_t f = 2; f <= f_max; ++f)
    for (int n = 1; n <= n_max; ++n)
      for (int m = 0; m < n; ++m) {
        if (m_only >= 0 && m != m_only) continue;
        for (auto b : coprime_bs(bs, f))
          tasks.push_back([=] { return check_congruence(make_context_q(AbelianFieldQ::cyclotomic(f), f, b, n), n, m, which); });
      }
  auto parts = run_parallel(tasks, jobs);
  auto r = merge_all(parts, which == CongruenceModulus::full ? "congruence mod w" : "congruence mod f-part of w");
  long na = 0;
  for (auto& p : parts) na += !p.applicable;
  r.note = std::to_string(na) + " of " + std::to_string(parts.size()) + " cases not applicable (gcd(Nb, w) != 1)";
  return r;
}

inline CheckReport sweep_distribution(int f_max, int n_max, const std::vector<std::int64_t>& ls, int jobs) {
  std::vector<std::function<CheckReport()>> tasks;
  for (std::int64_t f = 2; f <= f_max; ++f)
    for (auto l : ls) {
      if (f % l == 0) continue;
      tasks.push_back([=] {
        CheckReport r;
        for (int n = 0; n <= n_max; ++n)
          for (auto a : unit_group(f)) {
            if (verify_distribution(f, l, n, a)) r.ok();
            else r.fail("f=" + std::to_string(f) + " l=" + std::to_string(l) + " n=" + std::to_string(n) + " a=" + std::to_string(a));
          }
        return r;
      });
    }
  return merge_all(run_parallel(tasks, jobs), "distribution relation");
}

inline CheckReport sweep_tower(const std::vector<std::int64_t>& fs, int n_max, const std::vector<std::int64_t>& ls, int k_max,
                               const std::vector<std::int64_t>& bs, int jobs) {
  std::vector<std::function<CheckReport()>> tasks;
  for (auto f : fs)
    for (auto l : ls)
      for (auto b : coprime_bs(bs, f * l))
        tasks.push_back([=] {
          CheckReport r;
          auto base = AbelianFieldQ::cyclotomic(f);
          for (int n = 0; n <= n_max; ++n)
            for (int k = 0; k < k_max; ++k) {
              if (verify_tower_restriction(base, b, n, l, k)) r.ok();
              else r.fail("f=" + std::to_string(f) + " l=" + std::to_string(l) + " b=" + std::to_string(b) + " n=" + std::to_string(n) +
                          " k=" + std::to_string(k));
            }
          return r;
        });
  return merge_all(run_parallel(tasks, jobs), "tower restriction");
}

// w_1(Q) = 2, w_2(Q) = 24, w_1(Q(i)) = 4 by direct search up to w_n_search_bound, and the same from w_n.
inline CheckReport wn_values_check() {
  CheckReport r;
  r.name = "w_n values";
  struct Case {
    std::int64_t f;
    int n;
    std::int64_t expect;
  };
  for (auto c : {Case{1, 1, 2}, Case{1, 2, 24}, Case{4, 1, 4}}) {
    auto field = AbelianFieldQ::cyclotomic(c.f);
    std::int64_t bound = w_n_search_bound(field, c.n);
    std::int64_t brute = w_n_bruteforce(field, c.n, bound);
    BigInt formula = w_n(field, c.n);
    std::string tag = "w_" + std::to_string(c.n) + "(Q(mu_" + std::to_string(c.f) + ")) ";
    if (brute == c.expect) r.ok();
    else r.fail(tag + "search up to " + std::to_string(bound) + " gives " + std::to_string(brute));
    if (formula == c.expect) r.ok();
    else r.fail(tag + "prime-by-prime gives " + formula.str());
  }
  return r;
}

inline CheckReport quillen_suite(const std::vector<std::int64_t>& qs, const std::vector<int>& fs, const std::vector<int>& ms, int jobs) {
  std::vector<std::function<CheckReport()>> tasks;
  for (auto q : qs)
    for (int f : fs)
      for (int m : ms) tasks.push_back([=] { return check_quillen_identities(q, f, m); });
  return merge_all(run_parallel(tasks, jobs), "quillen identities");
}

// Seeded random sequences: contracts for derive_gamma / derive_lambda, annihilation on the induced four-term sequence.
inline CheckReport splitting_property_suite(int count, std::uint64_t seed, int jobs, std::int64_t max_order = kExhaustiveBound) {
  std::vector<std::function<CheckReport()>> tasks;
  for (int i = 0; i < count; ++i)
    tasks.push_back([=] {
      std::mt19937_64 rng(seed * 1000003 + i);
      std::int64_t l = std::uniform_int_distribution<int>(0, 1)(rng) ? 5 : 3;
      int k = std::uniform_int_distribution<int>(1, 3)(rng);
      static const std::vector<std::vector<int>> groups{{1}, {2}, {3}, {4}, {2, 2}, {5}, {6}, {2, 3}};
      auto orders = groups[std::uniform_int_distribution<std::size_t>(0, groups.size() - 1)(rng)];
      auto g = cyclic_product_group(orders);
      auto cs = random_splitting_case(rng(), l, k, g, max_order);
      CheckReport r;
      try {
        auto gm = derive_gamma(cs.ses, cs.r, cs.lambda);
        r.merge(check_contracts(cs.ses, {cs.lambda, gm, cs.r}, rng()));
        auto lm2 = derive_lambda(cs.ses, cs.r, gm);
        r.merge(check_contracts(cs.ses, {lm2, derive_gamma(cs.ses, cs.r, lm2), cs.r}, rng()));
        // d = l pi, so r' = l r satisfies d o Lambda = r'
        auto seq = induced_four_term(cs.ses, l);
        r.merge(verify_annihilation(seq, cs.r.scaled(Rational(l)), cs.lambda, rng()));
      } catch (const ContractError& e) {
        r.fail(cs.description + ": " + e.what());
      }
      for (auto& w : r.witnesses) w = cs.description + ": " + w;
      return r;
    });
  return merge_all(run_parallel(tasks, jobs), "splitting contracts");
}

// ---- simulator suite ----

struct ScenarioCandidate {
  std::int64_t f;
  std::vector<std::int64_t> subgroup;
  std::int64_t l;
};

// Seeded scenario specs: fields Q, Q(i), Q(sqrt(-3)), Q(sqrt 5), Q(mu_5); l in {3, 5}; n - m in {-1, 0, 1, 2};
// split and twisted; k_max = max(k(v), 1) + 1.
inline ScenarioSpec random_scenario_spec(std::uint64_t seed) {
  static const std::vector<ScenarioCandidate> bases{{1, {}, 3}, {4, {}, 3}, {3, {}, 3}, {5, {4}, 3}, {5, {}, 3}, {1, {}, 5}, {4, {}, 5}};
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto c = bases[std::uniform_int_distribution<std::size_t>(0, bases.size() - 1)(rng)];
    ScenarioSpec s;
    s.f = c.f;
    s.subgroup = c.subgroup;
    s.l = c.l;
    s.seed = seed;
    s.m = std::uniform_int_distribution<int>(1, 3)(rng);
    s.n = s.m + std::uniform_int_distribution<int>(-1, 2)(rng);
    if (s.n < 1) continue;
    s.p = std::uniform_int_distribution<std::int64_t>(2, 60)(rng);
    if (!is_prime(s.p) || s.p == s.l || s.f % s.p == 0) continue;
    s.b = std::uniform_int_distribution<std::int64_t>(2, 30)(rng);
    if (gcd64(s.b, s.f * s.l) != 1) continue;
    s.twisted = std::uniform_int_distribution<int>(0, 1)(rng);
    s.a_chars = {s.m, s.m + 1};
    s.a_chars.resize(std::uniform_int_distribution<int>(1, 2)(rng));
    s.a_chars_set = true;
    s.a_exp = std::uniform_int_distribution<int>(1, 2)(rng);
    auto field = s.field();
    std::int64_t qv = ipow(s.p, static_cast<int>(residue_degree(field, s.p)));
    int kv = k_of_v(qv, s.n, s.l);
    s.k_max = std::max(kv, 1) + 1;
    if (field.degree() * euler_phi(ipow(s.l, s.k_max)) > 150) continue;
    return s;
  }
  throw ScenarioError("no scenario found for seed " + std::to_string(seed));
}

// A scenario with k_max raised until the level-0 system stabilizes (at most 5).
inline LocalizationScenario build_stable_scenario(ScenarioSpec s) {
  for (;;) {
    LocalizationScenario sc(s);
    try {
      sc.stable_level();
      return sc;
    } catch (const StabilizationError&) {
      if (s.k_max >= 5) throw;
      ++s.k_max;
    }
  }
}

// Two-layer families used by the acceptance suite.
inline std::vector<ScenarioSpec> acceptance_family_specs() {
  std::vector<ScenarioSpec> out;
  auto mk = [&](std::int64_t f, std::int64_t p, std::int64_t l, std::int64_t b, int m, int n, int kmax, bool tw, std::vector<int> aj, int aexp,
                std::int64_t q) {
    ScenarioSpec s;
    s.f = f;
    s.p = p;
    s.l = l;
    s.b = b;
    s.m = m;
    s.n = n;
    s.k_max = kmax;
    s.twisted = tw;
    s.a_chars = std::move(aj);
    s.a_chars_set = true;
    s.a_exp = aexp;
    s.admissible = {q};
    s.admissible_set = true;
    s.seed = 7;
    out.push_back(s);
  };
  mk(4, 5, 3, 7, 1, 2, 2, false, {1}, 1, 11);
  mk(4, 5, 3, 7, 1, 2, 2, true, {1}, 2, 11);
  mk(1, 7, 3, 5, 1, 2, 3, true, {1, 3}, 2, 13);
  mk(1, 7, 3, 5, 2, 1, 3, true, {1}, 2, 13);
  mk(1, 11, 5, 3, 1, 2, 2, false, {1}, 1, 7);
  return out;
}

}  // namespace stickel
