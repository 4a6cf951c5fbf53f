#pragma once

#include "stickel/cyclotomic_galois.hpp"
#include "stickel/finite_module.hpp"
#include "stickel/group_ring.hpp"
#include "stickel/report.hpp"

#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace stickel {

struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// exhaustive element checks up to this many elements, sampling above
inline constexpr std::int64_t kExhaustiveBound = 6561;  // 3^8
inline constexpr int kSampleCount = 4096;

inline ModPtr make_module(GroupPtr g, std::vector<std::int64_t> orders, const std::vector<std::pair<int, Mat64>>& gens) {
  auto m = std::make_shared<const FiniteGModule>(std::move(g), std::move(orders), gens);
  // G abelian: generator matrices must commute
  for (auto& [s, a] : gens)
    for (auto& [t, b] : gens)
      for (int j = 0; j < m->rank(); ++j) {
        Elem e = m->basis(j);
        if (!m->equal(m->act(s, m->act(t, e)), m->act(t, m->act(s, e))))
          throw ModuleError("action matrices of " + m->group()->label(s) + " and " + m->group()->label(t) + " do not commute");
      }
  return m;
}

// x -> r x
inline ModuleMap action_map(const ModPtr& m, const QGroupRing& r) {
  std::vector<Elem> imgs;
  for (int j = 0; j < m->rank(); ++j) imgs.push_back(m->act(r, m->basis(j)));
  return ModuleMap::from_images(m, m, imgs);
}

inline std::string elem_str(const Elem& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  return os.str() + ")";
}

// Calls fn on every element when |M| <= bound, else on `samples` random elements drawn from seed.
inline void for_elements(const ModPtr& m, std::uint64_t seed, const std::function<void(const Elem&)>& fn,
                         std::int64_t bound = kExhaustiveBound, int samples = kSampleCount) {
  if (m->size() <= bound) {
    m->for_each_element(fn);
    return;
  }
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    Elem x = m->zero();
    for (int i = 0; i < m->rank(); ++i) x[i] = std::uniform_int_distribution<std::int64_t>(0, m->orders()[i] - 1)(rng);
    fn(x);
  }
}

inline bool is_injective(const ModuleMap& f) { return PreimageSolver(f).kernel_generators().empty(); }
inline bool is_surjective(const ModuleMap& f) { return image(f).module->size() == f.target()->size(); }

struct ShortExactSequence {
  ModPtr a, b, c;
  ModuleMap iota, pi;
};

inline void validate(const ShortExactSequence& s) {
  if (!s.iota.is_equivariant()) throw ContractError("iota is not G-equivariant");
  if (!s.pi.is_equivariant()) throw ContractError("pi is not G-equivariant");
  if (!is_injective(s.iota)) throw ContractError("iota is not injective");
  if (!is_surjective(s.pi)) throw ContractError("pi is not surjective");
  if (!s.pi.after(s.iota).is_zero()) throw ContractError("pi o iota != 0");
  if (s.a->size() * s.c->size() != s.b->size()) throw ContractError("sequence is not exact in the middle");
}

inline ShortExactSequence make_ses(ModuleMap iota, ModuleMap pi) {
  ShortExactSequence s{iota.source(), iota.target(), pi.target(), iota, pi};
  validate(s);
  return s;
}

// 0 -> A -> B -> C -> D -> 0
struct FourTermSequence {
  ModPtr a, b, c, d;
  ModuleMap iota, del, q;
  std::vector<Elem> d_lifts;  // d_lifts[i] in C maps to basis i of D
};

inline void validate(const FourTermSequence& s) {
  for (auto* f : {&s.iota, &s.del, &s.q})
    if (!f->is_equivariant()) throw ContractError("map in the four-term sequence is not G-equivariant");
  if (!is_injective(s.iota)) throw ContractError("iota is not injective");
  if (!is_surjective(s.q)) throw ContractError("q is not surjective");
  if (!s.del.after(s.iota).is_zero() || !s.q.after(s.del).is_zero()) throw ContractError("consecutive maps do not compose to zero");
  BigInt im_del = image(s.del).module->size();
  if (s.a->size() * im_del != s.b->size()) throw ContractError("not exact at B");
  if (im_del * s.d->size() != s.c->size()) throw ContractError("not exact at C");
}

// D = coker(del) with its quotient map.
inline FourTermSequence cokernel_div(const ModuleMap& iota, const ModuleMap& del) {
  auto co = cokernel(del);
  FourTermSequence s{iota.source(), iota.target(), del.target(), co.module, iota, del, co.projection, co.lifts};
  validate(s);
  return s;
}

// Gamma(b) = iota^{-1}((Lambda o pi)(-b) + r b).
inline ModuleMap derive_gamma(const ShortExactSequence& s, const QGroupRing& r, const ModuleMap& lambda) {
  auto rc = action_map(s.c, r), rb = action_map(s.b, r), ra = action_map(s.a, r);
  if (!(s.pi.after(lambda) == rc)) throw ContractError("lambda violates pi o Lambda = r");
  if (!lambda.is_equivariant()) throw ContractError("lambda is not G-equivariant");
  PreimageSolver inv(s.iota);
  std::vector<Elem> imgs;
  for (int j = 0; j < s.b->rank(); ++j) {
    Elem bj = s.b->basis(j);
    Elem y = s.b->add(lambda(s.pi(s.b->scale(bj, -1))), rb(bj));
    auto x = inv.solve(y);
    if (!x) throw ContractError("Lambda(pi(-b)) + r b not in the image of iota for b = " + elem_str(bj));
    imgs.push_back(*x);
  }
  ModuleMap gamma = ModuleMap::from_images(s.b, s.a, imgs);
  if (!(gamma.after(s.iota) == ra)) throw ContractError("derived Gamma fails Gamma o iota = r");
  if (!gamma.after(lambda).is_zero()) throw ContractError("derived Gamma fails Gamma o Lambda = 0");
  if (!gamma.is_equivariant()) throw ContractError("derived Gamma is not G-equivariant");
  return gamma;
}

// Lambda(c) = (iota o Gamma)(-b) + r b for any b over c; independence over lifts checked on ker pi.
inline ModuleMap derive_lambda(const ShortExactSequence& s, const QGroupRing& r, const ModuleMap& gamma,
                               std::int64_t bound = kExhaustiveBound) {
  auto ra = action_map(s.a, r), rb = action_map(s.b, r), rc = action_map(s.c, r);
  if (!(gamma.after(s.iota) == ra)) throw ContractError("gamma violates Gamma o iota = r");
  if (!gamma.is_equivariant()) throw ContractError("gamma is not G-equivariant");
  auto phi = [&](const Elem& b) { return s.b->add(s.iota(gamma(s.b->scale(b, -1))), rb(b)); };
  // phi vanishes on ker pi = iota(A), so Lambda does not depend on the lift
  for_elements(s.a, 0x5eed, [&](const Elem& a) {
    if (!s.b->is_zero(phi(s.iota(a)))) throw ContractError("Lambda depends on the lift: iota(a) with a = " + elem_str(a));
  }, bound);
  PreimageSolver lift(s.pi);
  std::vector<Elem> imgs;
  for (int j = 0; j < s.c->rank(); ++j) {
    auto b = lift.solve(s.c->basis(j));
    if (!b) throw ContractError("pi is not surjective");
    imgs.push_back(phi(*b));
  }
  ModuleMap lambda = ModuleMap::from_images(s.c, s.b, imgs);
  if (!(s.pi.after(lambda) == rc)) throw ContractError("derived Lambda fails pi o Lambda = r");
  if (!gamma.after(lambda).is_zero()) throw ContractError("derived Lambda fails Gamma o Lambda = 0");
  if (!lambda.is_equivariant()) throw ContractError("derived Lambda is not G-equivariant");
  return lambda;
}

struct SplittingPair {
  ModuleMap lambda;
  ModuleMap gamma;
  QGroupRing r;
};

// pi o Lambda = r, Gamma o iota = r, Gamma o Lambda = 0, Lambda o pi + iota o Gamma = r, element by element.
inline CheckReport check_contracts(const ShortExactSequence& s, const SplittingPair& p, std::uint64_t seed = 1,
                                   std::int64_t bound = kExhaustiveBound) {
  CheckReport rep;
  rep.name = "splitting contracts";
  auto ra = action_map(s.a, p.r), rb = action_map(s.b, p.r), rc = action_map(s.c, p.r);
  auto fail_at = [&](const char* what, const Elem& x) { rep.fail(std::string(what) + " fails at " + elem_str(x)); };
  long c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  for_elements(s.c, seed, [&](const Elem& c) {
    Elem lc = p.lambda(c);
    if (!s.c->equal(s.pi(lc), rc(c))) fail_at("pi o Lambda = r", c);
    else ++c1;
    if (!s.a->is_zero(p.gamma(lc))) fail_at("Gamma o Lambda = 0", c);
    else ++c3;
  }, bound);
  for_elements(s.a, seed + 1, [&](const Elem& a) {
    if (!s.a->equal(p.gamma(s.iota(a)), ra(a))) fail_at("Gamma o iota = r", a);
    else ++c2;
  }, bound);
  for_elements(s.b, seed + 2, [&](const Elem& b) {
    if (!s.b->equal(s.b->add(p.lambda(s.pi(b)), s.iota(p.gamma(b))), rb(b))) fail_at("Lambda o pi + iota o Gamma = r", b);
    else ++c4;
  }, bound);
  rep.checked = c1 + c2 + c3 + c4 + rep.failed;
  return rep;
}

// r D = 0, computed directly; and for every d with lift c, r c lies in the image of del.
inline CheckReport verify_annihilation(const FourTermSequence& s, const QGroupRing& r, const ModuleMap& lambda,
                                       std::uint64_t seed = 1, std::int64_t bound = kExhaustiveBound) {
  if (!(s.del.after(lambda) == action_map(s.c, r))) throw ContractError("lambda violates del o Lambda = r on C");
  CheckReport rep;
  rep.name = "annihilation of the cokernel";
  auto rd = action_map(s.d, r), rc = action_map(s.c, r);
  PreimageSolver in_image(s.del);
  for_elements(s.d, seed, [&](const Elem& d) {
    if (!s.d->is_zero(rd(d))) {
      rep.fail("r d != 0 for d = " + elem_str(d));
      return;
    }
    Elem c = s.c->zero();
    for (std::size_t i = 0; i < d.size(); ++i) c = s.c->add(c, s.c->scale(s.d_lifts[i], d[i]));
    if (!in_image.solve(rc(c))) rep.fail("r c not in the image of del for a lift of d = " + elem_str(d));
    else rep.ok();
  }, bound);
  return rep;
}

// ---- random test material ----

// Modules for randomized suites: sums of (Z/l^e)(chi) and (Z/l^e)[G](chi) pieces.
namespace detail {

inline std::vector<std::int64_t> random_character(const GroupPtr& g, std::int64_t le, std::mt19937_64& rng) {
  const std::int64_t e = g->exponent();
  std::vector<std::int64_t> roots;  // w with w^e = 1
  for (std::int64_t w = 1; w < le; ++w)
    if (gcd64(w, le) == 1 && powmod(w, e, le) == 1) roots.push_back(w);
  auto chars = enumerate_characters(*g);
  auto& c = chars[std::uniform_int_distribution<std::size_t>(0, chars.size() - 1)(rng)];
  std::int64_t w = roots[std::uniform_int_distribution<std::size_t>(0, roots.size() - 1)(rng)];
  std::vector<std::int64_t> out;
  for (int x = 0; x < g->size(); ++x) out.push_back(powmod(w, c[x], le));
  return out;
}

inline ModPtr character_piece(const GroupPtr& g, std::int64_t le, const std::vector<std::int64_t>& chi) {
  return FiniteGModule::from_generators(g, {le}, [&](int s) { return Mat64{{chi[s]}}; });
}

inline ModPtr regular_piece(const GroupPtr& g, std::int64_t le, const std::vector<std::int64_t>& chi) {
  const int n = g->size();
  return FiniteGModule::from_generators(g, std::vector<std::int64_t>(n, le), [&](int s) {
    Mat64 m(n, std::vector<std::int64_t>(n, 0));
    for (int x = 0; x < n; ++x) m[g->mul(s, x)][x] = chi[s];
    return m;
  });
}

}  // namespace detail

inline ModPtr random_module(const GroupPtr& g, std::int64_t l, int k, std::mt19937_64& rng, std::int64_t max_order) {
  ModPtr m;
  int pieces = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int t = 0; t < pieces; ++t) {
    int e = std::uniform_int_distribution<int>(1, k)(rng);
    std::int64_t le = ipow(l, e);
    auto chi = detail::random_character(g, le, rng);
    bool regular = std::uniform_int_distribution<int>(0, 2)(rng) == 0;
    ModPtr piece = regular ? detail::regular_piece(g, le, chi) : detail::character_piece(g, le, chi);
    BigInt sz = piece->size() * (m ? m->size() : BigInt(1));
    if (sz > max_order) {
      if (m) break;
      piece = detail::character_piece(g, le, chi);
    }
    m = m ? direct_sum(m, piece) : piece;
  }
  return m;
}

struct RandomSplittingCase {
  ShortExactSequence ses;
  QGroupRing r;
  ModuleMap lambda;
  std::string description;
};

// B random, A the G-submodule generated by random elements, C = B/A.
// Lambda = r o s with s the lift section and r = u * exp(A) for random u in Z[G]:
// exp(A) kills the failure of s to be additive and equivariant.
inline RandomSplittingCase random_splitting_case(std::uint64_t seed, std::int64_t l, int k, const GroupPtr& g,
                                                 std::int64_t max_order = kExhaustiveBound) {
  std::mt19937_64 rng(seed);
  auto b = random_module(g, l, k, rng, max_order);
  std::vector<Elem> gens;
  int ngen = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int t = 0; t < ngen; ++t) {
    Elem x = b->zero();
    for (int i = 0; i < b->rank(); ++i) x[i] = std::uniform_int_distribution<std::int64_t>(0, b->orders()[i] - 1)(rng);
    for (int s = 0; s < g->size(); ++s) gens.push_back(b->act(s, x));
  }
  auto sub = submodule(b, gens);
  auto quo = quotient(b, gens);
  auto ses = make_ses(sub.inclusion, quo.projection);
  QGroupRing u(g);
  for (int i = 0; i < g->size(); ++i) u[i] = Rational(std::uniform_int_distribution<int>(-3, 3)(rng));
  QGroupRing r = u.scaled(Rational(static_cast<long long>(sub.module->exponent())));
  auto rb = action_map(b, r);
  std::vector<Elem> imgs;
  for (auto& lift : quo.lifts) imgs.push_back(rb(lift));
  ModuleMap lambda = ModuleMap::from_images(ses.c, b, imgs);
  std::ostringstream os;
  os << "seed=" << seed << " l=" << l << " k=" << k << " |G|=" << g->size() << " A=" << ses.a->describe()
     << " B=" << b->describe() << " C=" << ses.c->describe();
  return {ses, r, lambda, os.str()};
}

// Four-term sequence induced from a short exact one by del = t pi: D = C/tC, and Lambda works with r t.
inline FourTermSequence induced_four_term(const ShortExactSequence& s, std::int64_t t) {
  ModuleMap del = s.pi.scaled(t);
  auto ker = kernel(del);
  return cokernel_div(ker.inclusion, del);
}

}  // namespace stickel
