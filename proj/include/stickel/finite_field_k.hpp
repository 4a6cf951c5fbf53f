#pragma once

#include "stickel/exact_arith.hpp"
#include "stickel/finite_module.hpp"
#include "stickel/group_ring.hpp"
#include "stickel/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stickel {

inline bool is_prime_power(std::int64_t q) {
  auto f = factorize(q);
  return q >= 2 && f.size() == 1;
}

// |K_{2m-1}(F_q)| = q^m - 1.
inline BigInt k_order(std::int64_t q, int m) {
  if (!is_prime_power(q)) throw PreconditionError("q must be a prime power");
  if (m < 1) throw PreconditionError("m must be >= 1");
  return big_pow(BigInt(q), static_cast<unsigned>(m)) - 1;
}

// K_{2m-1}(F_q) as Z/(q^m - 1), written additively.
struct CyclicKGroup {
  std::int64_t q;
  int m;
  std::int64_t order;
};

inline CyclicKGroup cyclic_k_group(std::int64_t q, int m) {
  BigInt o = k_order(q, m);
  if (o > BigInt(std::numeric_limits<std::int64_t>::max() / 4)) throw PreconditionError("group order too large");
  return {q, m, to_i64(o)};
}

// K_{2m-1}(F_q; Z/l^k) = K_{2m-1}(F_q)/l^k; the even degree K_{2m}(F_q; Z/l^k) is the l^k-torsion, same order.
struct CoeffKGroup {
  CyclicKGroup base;
  std::int64_t l;
  int k;
  bool odd_degree = true;
  std::int64_t order;
  bool bott_generator = true;  // generator 1 is the fixed Bott-compatible one
};

inline CoeffKGroup coeff_k_group(const CyclicKGroup& base, std::int64_t l, int k, bool odd_degree = true) {
  if (!is_prime(l) || k < 1) throw PreconditionError("coefficients need a prime l and k >= 1");
  int v = base.order % l == 0 ? l_valuation(BigInt(base.order), l) : 0;
  return {base, l, k, odd_degree, ipow(l, std::min(k, v)), true};
}

// Fr_q acting on K_{2m-1}(F_{q^f}) = Z/(q^{fm} - 1): multiplication by q^m.
inline std::int64_t frobenius_action(std::int64_t q, int f, int m, std::int64_t x) {
  std::int64_t big = cyclic_k_group(q, f * m).order;
  return mulmod(powmod(q, m, big), x, big);
}

inline std::int64_t inclusion_map(std::int64_t q, int f, int m, std::int64_t y) {
  std::int64_t big = cyclic_k_group(q, f * m).order, small = cyclic_k_group(q, m).order;
  return mulmod(mod(y, small), big / small, big);
}

inline std::int64_t norm_map(std::int64_t q, int f, int m, std::int64_t x) {
  std::int64_t big = cyclic_k_group(q, f * m).order, small = cyclic_k_group(q, m).order;
  return mod(mod(x, big), small);
}

namespace detail {

struct Bits {
  std::vector<std::uint64_t> w;
  explicit Bits(std::uint64_t n) : w((n + 63) / 64, 0) {}
  void set(std::uint64_t i) { w[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool get(std::uint64_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
};

}  // namespace detail

// Exhaustive check over Z/(q^{fm}-1) and Z/(q^m-1): i injective, N surjective, Fr-fixed points = im i,
// ker N = im(Fr - 1) = (q^m - 1)-multiples, i o N = sum of Fr^j, coinvariants of order q^m - 1.
// Loops step incrementally, no division per element.
inline CheckReport check_quillen_identities(std::int64_t q, int f, int m) {
  CheckReport r;
  r.name = "quillen q=" + std::to_string(q) + " f=" + std::to_string(f) + " m=" + std::to_string(m);
  const std::uint64_t big = static_cast<std::uint64_t>(cyclic_k_group(q, f * m).order);
  const std::uint64_t small = static_cast<std::uint64_t>(cyclic_k_group(q, m).order);
  const std::uint64_t c = big / small;
  const std::uint64_t s = static_cast<std::uint64_t>(powmod(q, m, static_cast<std::int64_t>(big)));
  std::uint64_t sum_fr = 0, pw = 1;
  for (int j = 0; j < f; ++j) {
    sum_fr = (sum_fr + pw) % big;
    pw = static_cast<std::uint64_t>(mulmod(static_cast<std::int64_t>(pw), static_cast<std::int64_t>(s), static_cast<std::int64_t>(big)));
  }
  auto step = [big](std::uint64_t& acc, std::uint64_t inc) {
    acc += inc;
    if (acc >= big) acc -= big;
  };
  std::string tag = "q=" + std::to_string(q) + " f=" + std::to_string(f) + " m=" + std::to_string(m) + ": ";

  // image of i
  detail::Bits img_i(big);
  std::uint64_t distinct = 0;
  for (std::uint64_t y = 0, iy = 0; y < small; ++y, step(iy, c % big)) {
    if (!img_i.get(iy)) ++distinct;
    img_i.set(iy);
  }
  if (distinct == small) r.ok();
  else r.fail(tag + "inclusion not injective");

  // image of Fr - 1
  detail::Bits img_f(big);
  std::uint64_t img_f_size = 0;
  const std::uint64_t sm1 = (s + big - 1) % big;
  for (std::uint64_t x = 0, v = 0; x < big; ++x, step(v, sm1)) {
    if (!img_f.get(v)) ++img_f_size;
    img_f.set(v);
  }

  // main pass
  std::vector<char> hit(small, 0);
  std::uint64_t fixed_bad = 0, ker_bad = 0, trace_bad = 0, ker_size = 0;
  std::uint64_t fx = 0, sx = 0, rx = 0;  // Fr(x), (sum Fr^j)(x), N(x)
  for (std::uint64_t x = 0; x < big; ++x) {
    hit[rx] = 1;
    if ((fx == x) != img_i.get(x)) ++fixed_bad;
    bool in_ker = rx == 0;
    ker_size += in_ker;
    if (in_ker != img_f.get(x)) ++ker_bad;
    if (rx * c != sx) ++trace_bad;  // rx * c < big
    step(fx, s);
    step(sx, sum_fr);
    if (++rx == small) rx = 0;
  }
  bool surj = true;
  for (char h : hit) surj = surj && h;
  if (surj) r.ok();
  else r.fail(tag + "norm not surjective");
  if (fixed_bad == 0) r.ok();
  else r.fail(tag + std::to_string(fixed_bad) + " elements where Fr-fixed differs from image of i");
  if (ker_bad == 0) r.ok();
  else r.fail(tag + std::to_string(ker_bad) + " elements where ker N differs from im(Fr - 1)");
  if (trace_bad == 0) r.ok();
  else r.fail(tag + std::to_string(trace_bad) + " elements where i o N differs from sum of Frobenius powers");
  if (big / img_f_size == small && big % img_f_size == 0) r.ok();
  else r.fail(tag + "coinvariants have the wrong order");
  if (distinct * ker_size == big) r.ok();
  else r.fail(tag + "|im i| * |ker N| != q^{fm} - 1");
  return r;
}

// l-adic valuation of q_v^n - 1; cross-checked against v_l(q_v - 1) + v_l(n) when l is odd and l | q_v - 1.
inline int k_of_v(std::int64_t qv, int n, std::int64_t l) {
  if (qv % l == 0) throw PreconditionError("l divides q_v");
  if (n < 1) throw PreconditionError("n must be >= 1");
  BigInt x = big_pow(BigInt(qv), static_cast<unsigned>(n)) - 1;
  int k = x % l == 0 ? l_valuation(x, l) : 0;
  if (l != 2 && (qv - 1) % l == 0) {
    int alt = l_valuation(BigInt(qv - 1), l) + (n % l == 0 ? l_valuation(BigInt(n), l) : 0);
    if (alt != k) throw ArithmeticError("lifting-the-exponent formula disagrees at q_v=" + std::to_string(qv));
  }
  return k;
}

// rank of K_n(O_F) for a field with r1 real and r2 complex places
inline int borel_rank(int n, int r1, int r2) {
  if (n < 0) throw PreconditionError("n must be >= 0");
  if (n == 0) return 1;
  if (n == 1) return r1 + r2 - 1;
  if (n % 2 == 0) return 0;
  if (n % 4 == 1) return r1 + r2;
  return r2;
}

// Coset decomposition G = union t_i <d>: every x is t_{comp[x]} d^{dexp[x]}.
struct InducedLayout {
  int frob;
  int residue_degree;
  std::vector<int> reps;
  std::vector<int> comp;
  std::vector<int> dexp;
};

inline InducedLayout induced_layout(const GaloisGroup& g, int frob) {
  InducedLayout lay;
  lay.frob = frob;
  lay.residue_degree = g.order_of(frob);
  lay.comp.assign(g.size(), -1);
  lay.dexp.assign(g.size(), 0);
  for (int x = 0; x < g.size(); ++x) {
    if (lay.comp[x] >= 0) continue;
    int c = static_cast<int>(lay.reps.size());
    lay.reps.push_back(x);  // minimal index in its coset
    int y = x;
    for (int e = 0; e < lay.residue_degree; ++e) {
      lay.comp[y] = c;
      lay.dexp[y] = e;
      y = g.mul(y, frob);
    }
  }
  return lay;
}

// Sum over the primes w | v of cyclic groups of the given order; d acts on the w = t_i component by `scalar`,
// and with a character chi (values mod the order) sigma additionally acts by chi(sigma)^twist.
struct GaloisCyclicModule {
  ModPtr module;
  InducedLayout layout;
  std::int64_t scalar;
  std::int64_t order;
  std::vector<std::int64_t> chi;  // empty: no coefficient structure
  int twist = 0;
};

inline GaloisCyclicModule induced_module(GroupPtr g, int frob, std::int64_t scalar, std::int64_t order,
                                         std::vector<std::int64_t> chi = {}, int twist = 0) {
  if (order < 1) throw PreconditionError("summand order must be positive");
  auto lay = induced_layout(*g, frob);
  if (powmod(scalar, lay.residue_degree, order) != 1 % order)
    throw PreconditionError("Frobenius scalar " + std::to_string(scalar) + " has order not dividing the residue degree " +
                            std::to_string(lay.residue_degree));
  if (!chi.empty() && chi.size() != static_cast<std::size_t>(g->size())) throw PreconditionError("character has wrong length");
  const int r = static_cast<int>(lay.reps.size());
  auto mod_ = FiniteGModule::from_generators(g, std::vector<std::int64_t>(r, order), [&](int s) {
    Mat64 m(r, std::vector<std::int64_t>(r, 0));
    std::int64_t tw = chi.empty() ? 1 : powmod_signed(chi[s], twist, order);
    for (int i = 0; i < r; ++i) {
      int y = g->mul(s, lay.reps[i]);
      m[lay.comp[y]][i] = mulmod(powmod(scalar, lay.dexp[y], order), tw, order);
    }
    return m;
  });
  return {mod_, lay, scalar, order, std::move(chi), twist};
}

// Multiply the action of sigma by chi(sigma)^j.
inline ModPtr twist_module(const ModPtr& m, const std::vector<std::int64_t>& chi, int j) {
  std::int64_t e = m->exponent();
  return FiniteGModule::from_generators(m->group(), m->orders(), [&](int s) {
    Mat64 a = m->matrix(s);
    std::int64_t t = powmod_signed(chi[s], j, e);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (auto& x : a[i]) x = mulmod(x, t, m->orders()[i]);
    return a;
  });
}

inline GaloisCyclicModule bott_twist(const GaloisCyclicModule& m, int j) {
  if (m.chi.empty()) throw PreconditionError("Bott twist needs a coefficient module with a cyclotomic character");
  GaloisCyclicModule out = m;
  out.twist = m.twist + j;
  out.module = twist_module(m.module, m.chi, j);
  return out;
}

}  // namespace stickel
