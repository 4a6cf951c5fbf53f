#pragma once

#include "stickel/splitting_sim.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace stickel {

// One localization scenario per layer F_L = F(mu_L), L a squarefree product of admissible primes.
struct EulerLayer {
  std::int64_t conductor_l = 1;       // L
  std::vector<std::int64_t> primes;   // prime factors of L
  LocalizationScenario scenario;
};

// Primes q <= bound with q coprime to f l b p.
inline std::vector<std::int64_t> admissible_primes(const ScenarioSpec& s) {
  if (s.admissible_set) {
    auto v = s.admissible;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }
  std::vector<std::int64_t> out;
  for (std::int64_t q = 2; q <= s.prime_bound; ++q)
    if (is_prime(q) && gcd64(q, s.f * s.l * s.b * s.p) == 1) out.push_back(q);
  return out;
}

class EulerFamily {
 public:
  // max_factors bounds the number of primes in L; the layer fields grow fast.
  explicit EulerFamily(ScenarioSpec spec, int max_factors = 2) : spec_(std::move(spec)) {
    validate(spec_);
    primes_ = admissible_primes(spec_);
    std::vector<std::vector<std::int64_t>> subsets{{}};
    for (auto q : primes_) {
      std::size_t n = subsets.size();
      for (std::size_t i = 0; i < n; ++i)
        if (static_cast<int>(subsets[i].size()) < max_factors) {
          auto t = subsets[i];
          t.push_back(q);
          subsets.push_back(t);
        }
    }
    AbelianFieldQ base = spec_.field();
    for (auto& ps : subsets) {
      std::int64_t L = 1;
      for (auto q : ps) L *= q;
      ScenarioSpec s = spec_;
      auto fl = compositum(base, AbelianFieldQ::cyclotomic(L));
      s.f = fl.modulus();
      s.subgroup = fl.subgroup();
      s.seed = spec_.seed + static_cast<std::uint64_t>(L);
      s.admissible_set = false;
      s.admissible.clear();
      s.prime_bound = 0;
      layers_.emplace(L, EulerLayer{L, ps, LocalizationScenario(s)});
    }
  }

  const ScenarioSpec& spec() const { return spec_; }
  const std::vector<std::int64_t>& primes() const { return primes_; }
  std::vector<std::int64_t> conductors() const {
    std::vector<std::int64_t> out;
    for (auto& [L, _] : layers_) out.push_back(L);
    return out;
  }
  const EulerLayer& layer(std::int64_t L) const {
    auto it = layers_.find(L);
    if (it == layers_.end()) throw PreconditionError("no layer with L=" + std::to_string(L));
    return it->second;
  }
  // (L, q) with L q also a layer
  std::vector<std::pair<std::int64_t, std::int64_t>> edges() const {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (auto& [L, lay] : layers_)
      for (auto q : primes_)
        if (L % q && layers_.count(L * q)) out.push_back({L, q});
    return out;
  }

  // Tr: M_{Lq,k} -> M_{L,k}
  ModuleMap transfer(std::int64_t L, std::int64_t q, int k) const {
    return level_transfer(layer(L * q).scenario.level(k), layer(L).scenario.level(k), spec_.p, spec_.m);
  }

  // Tr_0: P^k_{Lq,0} -> P^k_{L,0}
  ModuleMap transfer0(std::int64_t L, std::int64_t q, int k) const {
    const auto &hi = layer(L * q).scenario, &lo = layer(L).scenario;
    return level0_transfer(hi.level(k), lo.level(k), restriction_map(hi.base(), lo.base()), spec_.p, spec_.n);
  }

  // Lambda_m(xi) at layer L, level k.
  Elem es_element(std::int64_t L, int k, const Elem& xi) const { return layer(L).scenario.lambda_m(k, xi).first; }
  Elem es_special(std::int64_t L, int k, std::int64_t unit = 1) const { return layer(L).scenario.special_element(k, unit); }

  // Tr(Lambda_m(xi')) = (1 - q^m sigma_q^{-1}) Lambda_m(N xi') for every generator xi' of C_{Lq,k}.
  // swap_twist uses q^n instead, which should fail.
  CheckReport verify_es1(std::int64_t L, std::int64_t q, int k, bool swap_twist = false) const {
    const auto &hi = layer(L * q).scenario, &lo = layer(L).scenario;
    const Level &H = hi.level(k), &Lo = lo.level(k);
    CheckReport rep;
    rep.name = "norm relation at level " + std::to_string(k) + " L=" + std::to_string(L) + " q=" + std::to_string(q);
    ModuleMap tr = transfer(L, q, k);
    QGroupRing eu = euler_factor(Lo.g, Lo.field.artin_symbol(q), BigInt(q), swap_twist ? spec_.n : spec_.m);
    for (int i = 0; i < H.c.module->rank(); ++i) {
      Elem e = H.c.module->basis(i);
      Elem lhs = tr(hi.lambda_m(k, e).first);
      Elem lifted = H.mk->zero();
      for (int j = 0; j < H.c.module->rank(); ++j) lifted[H.a_rank() + j] = e[j];
      Elem ne = (*Lo.del)(tr(lifted));
      Elem rhs = Lo.mk->act(eu, lo.lambda_m(k, ne).first);
      if (Lo.mk->equal(lhs, rhs)) rep.ok();
      else rep.fail(repro(L, q) + " k=" + std::to_string(k) + " generator " + std::to_string(i) + ": Tr=" + elem_str(lhs) +
                    " Euler*Lambda=" + elem_str(rhs));
    }
    return rep;
  }

  // The three identities at layer L, levels k <= k', each reported on its own:
  // reduction r(lambda_{k'}) = lambda_k, boundary d(lambda) = Theta_n(b, L f) N(xi), and
  // Tr_0(lambda_{Lq}) = (1 - q^n sigma_q^{-1}) lambda' with lambda' built from the normed generator.
  struct Es2Report {
    CheckReport reduction, boundary, norm_relation;
    bool pass() const { return reduction.pass && boundary.pass && norm_relation.pass; }
  };

  Es2Report verify_es2(std::int64_t L, std::int64_t q, int k, int k2, bool swap_twist = false) const {
    const auto &hi = layer(L * q).scenario, &lo = layer(L).scenario;
    Es2Report out;
    std::string tag = " L=" + std::to_string(L) + " q=" + std::to_string(q) + " k=" + std::to_string(k) + " k'=" + std::to_string(k2);
    out.reduction = lo.verify_reduction_compat(k, k2);
    out.reduction.name = "reduction" + tag;
    out.boundary = lo.verify_special_element_boundary(k);
    out.boundary.name = "boundary" + tag;
    out.norm_relation.name = "norm relation" + tag;
    const Level &H = hi.level(k), &Lo = lo.level(k);
    Elem lhs = transfer0(L, q, k)(hi.special_element(k));
    Elem lifted = H.mk->zero();
    lifted[H.a_rank()] = 1;
    Elem ne = (*Lo.del)(transfer(L, q, k)(lifted));
    QGroupRing eu = euler_factor_q(lo.base(), q, swap_twist ? spec_.m : spec_.n);
    Elem rhs = Lo.p0->act(eu, lo.special_element_of(k, ne));
    if (Lo.p0->equal(lhs, rhs)) out.norm_relation.ok();
    else out.norm_relation.fail(repro(L, q) + " k=" + std::to_string(k) + ": Tr_0(lambda)=" + elem_str(lhs) + " Euler*lambda'=" + elem_str(rhs));
    return out;
  }

  // At a level stable for both layers: d Lambda_L(xi) = Theta_n(b, L f) xi on each layer and
  // Tr_0(Lambda_{Lq}(xi')) = (1 - q^n sigma_q^{-1}) Lambda_L(N_0 xi') for all xi'.
  CheckReport verify_es3(std::int64_t L, std::int64_t q, bool swap_twist = false) const {
    const auto &hi = layer(L * q).scenario, &lo = layer(L).scenario;
    CheckReport rep;
    rep.name = "assembled norm relation L=" + std::to_string(L) + " q=" + std::to_string(q);
    int ks = std::max(hi.stable_level(), lo.stable_level());
    if (ks > hi.k_max() || ks > lo.k_max()) throw StabilizationError("k_max too small for a common stable level");
    auto lm_hi = hi.assemble_lambda(ks), lm_lo = lo.assemble_lambda(ks);
    rep.merge(hi.verify_assembled_boundary(lm_hi, ks));
    rep.merge(lo.verify_assembled_boundary(lm_lo, ks));
    const Level &H = hi.level(ks), &Lo = lo.level(ks);
    ModuleMap tr0 = transfer0(L, q, ks);
    QGroupRing eu = euler_factor_q(lo.base(), q, swap_twist ? spec_.m : spec_.n);
    const int ra0 = H.a0->module->rank();
    for_elements(H.c0.module, spec_.seed, [&](const Elem& x) {
      Elem lifted = H.p0->zero();
      for (std::size_t j = 0; j < x.size(); ++j) lifted[ra0 + j] = x[j];
      Elem nx = (*Lo.del0)(tr0(lifted));
      Elem lhs = tr0(lm_hi(x)), rhs = Lo.p0->act(eu, lm_lo(nx));
      if (Lo.p0->equal(lhs, rhs)) rep.ok();
      else rep.fail(repro(L, q) + " xi'=" + elem_str(x) + ": Tr_0 Lambda=" + elem_str(lhs) + " Euler*Lambda(N xi')=" + elem_str(rhs));
    });
    return rep;
  }

  // lambda built from u xi equals u lambda, for a unit u mod l.
  CheckReport verify_generator_covariance(std::int64_t L, int k, std::int64_t unit) const {
    const auto& sc = layer(L).scenario;
    CheckReport rep;
    rep.name = "generator covariance L=" + std::to_string(L) + " k=" + std::to_string(k) + " u=" + std::to_string(unit);
    if (unit % spec_.l == 0) throw PreconditionError("u must be a unit mod l");
    const Level& Lv = sc.level(k);
    Elem a = sc.special_element(k, unit), b = Lv.p0->scale(sc.special_element(k), unit);
    if (Lv.p0->equal(a, b)) rep.ok();
    else rep.fail(repro(L, 1) + " k=" + std::to_string(k) + " u=" + std::to_string(unit) + ": " + elem_str(a) + " vs " + elem_str(b));
    return rep;
  }

  std::string repro(std::int64_t L, std::int64_t q) const {
    return layer(L).scenario.repro() + " L=" + std::to_string(L) + " q=" + std::to_string(q);
  }

 private:
  ScenarioSpec spec_;
  std::vector<std::int64_t> primes_;
  std::map<std::int64_t, EulerLayer> layers_;
};

struct EulerReport {
  std::vector<CheckReport> checks;
  bool pass() const {
    for (auto& c : checks)
      if (c.applicable && !c.pass) return false;
    return true;
  }
};

// Per-layer scenario checks, then all three axioms over every edge and pair of levels.
// swap_twist exchanges m and n in the Euler factors.
inline EulerReport run_family(const EulerFamily& fam, bool swap_twist = false) {
  EulerReport out;
  for (auto L : fam.conductors()) {
    auto rep = run_scenario(fam.layer(L).scenario);
    for (auto& c : rep.checks) {
      c.name = "layer " + std::to_string(L) + ": " + c.name;
      out.checks.push_back(c);
    }
  }
  CheckReport es1, red, bnd, nrm, es3, cov;
  es1.name = "norm relation for Lambda_m";
  red.name = "special element reduction";
  bnd.name = "special element boundary";
  nrm.name = "special element norm relation";
  es3.name = "assembled norm relation";
  cov.name = "generator covariance";
  const int kmax = fam.spec().k_max;
  for (auto [L, q] : fam.edges()) {
    try {
      for (int k = 1; k <= kmax; ++k) {
        es1.merge(fam.verify_es1(L, q, k, swap_twist));
        for (int k2 = k; k2 <= kmax; ++k2) {
          auto r = fam.verify_es2(L, q, k, k2, swap_twist);
          red.merge(r.reduction);
          bnd.merge(r.boundary);
          nrm.merge(r.norm_relation);
        }
      }
    } catch (const ScenarioError& e) {
      es1.fail(fam.repro(L, q) + ": " + e.what());
    }
    try {
      es3.merge(fam.verify_es3(L, q, swap_twist));
    } catch (const ScenarioError& e) {
      es3.fail(fam.repro(L, q) + ": " + e.what());
    }
  }
  std::int64_t u = 2;
  while (u % fam.spec().l == 0) ++u;
  for (auto L : fam.conductors()) cov.merge(fam.verify_generator_covariance(L, 1, u));
  if (fam.edges().empty())
    for (auto* r : {&es1, &red, &bnd, &nrm, &es3}) {
      r->applicable = false;
      r->note = "one layer: no norm relations";
    }
  for (auto* r : {&es1, &red, &bnd, &nrm, &es3, &cov}) out.checks.push_back(*r);
  return out;
}

}  // namespace stickel
