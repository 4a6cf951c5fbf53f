#pragma once

#include "stickel/cyclotomic_galois.hpp"
#include "stickel/exact_arith.hpp"
#include "stickel/group_ring.hpp"
#include "stickel/partial_zeta.hpp"
#include "stickel/report.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace stickel {

// Data for Theta_n(b, f): zeta table over the ray class group mod f, a target group G(F/K)
// with the restriction from the ray class group, the auxiliary class b and its norm.
struct StickContext {
  TablePtr zeta;
  GroupPtr target;
  std::vector<int> res;  // ray class index -> target index
  int b = 0;             // ray class index of b
  BigInt nb;
  int n = 0;
  std::optional<std::int64_t> modulus_q;  // f when K = Q
  std::optional<AbelianFieldQ> field_q;   // F when K = Q
};

// K = Q: F must lie in Q(mu_f).
inline StickContext make_context_q(const AbelianFieldQ& field, std::int64_t f, std::int64_t b, int n) {
  if (b < 1) throw PreconditionError("b must be a positive integer");
  if (gcd64(b, f) != 1) throw PreconditionError("b = " + std::to_string(b) + " is not coprime to f = " + std::to_string(f));
  if (n < 0) throw PreconditionError("n must be nonnegative");
  StickContext c;
  c.zeta = table_q(f, n + 1);
  auto ray = c.zeta->field_q().value();
  c.target = field.galois_group();
  c.res = restriction_map(ray, field);
  c.b = ray.artin_symbol(b);
  c.nb = b;
  c.n = n;
  c.modulus_q = f;
  c.field_q = field;
  return c;
}

// Default modulus: the conductor of F.
inline StickContext make_context_q(const AbelianFieldQ& field, std::int64_t b, int n) {
  return make_context_q(field, field.conductor(), b, n);
}

// General K from an ingested table; the target is the ray class group itself.
inline StickContext make_context(TablePtr table, const std::string& b_label, int n) {
  StickContext c;
  c.target = table->group();
  c.res.resize(c.target->size());
  for (int i = 0; i < c.target->size(); ++i) c.res[i] = i;
  c.b = c.target->index_of(b_label);
  c.nb = table->norm(c.b);
  if (c.nb <= 0) throw PreconditionError("class of b has no norm");
  c.n = n;
  c.zeta = std::move(table);
  return c;
}

inline StickContext with_twist(StickContext c, int n) {
  if (c.modulus_q && !c.zeta->has(0, n + 1)) c.zeta = table_q(*c.modulus_q, n + 1);
  c.n = n;
  return c;
}

// Delta_{n+1}(a, b, f) = Nb^{n+1} zeta_f(a, -n) - zeta_f(ab, -n).
inline Rational delta(const StickContext& c, int a, int n) {
  const auto& g = *c.zeta->group();
  Rational nbp = Rational(big_pow(c.nb, static_cast<unsigned>(n + 1)));
  return nbp * c.zeta->value(a, n) - c.zeta->value(g.mul(a, c.b), n);
}

inline Rational delta(const StickContext& c, int a) { return delta(c, a, c.n); }

// Theta_n(b, f) = sum_a Delta_{n+1}(a) (a, F)^{-1}, collected on G(F/K).
inline QGroupRing theta(const StickContext& c, int n) {
  const auto& g = *c.zeta->group();
  QGroupRing t(c.target);
  for (int a = 0; a < g.size(); ++a) t[c.res[g.inv(a)]] += delta(c, a, n);
  return t;
}

inline QGroupRing theta(const StickContext& c) { return theta(c, c.n); }

namespace detail {

inline bool supported_on(const BigInt& d, const BigInt& nb) {
  BigInt x = d;
  BigInt g;
  while ((g = boost::multiprecision::gcd(x, nb)) > 1)
    while (x % g == 0) x /= g;
  return x == 1;
}

inline std::string witness_prefix(const StickContext& c) {
  std::ostringstream os;
  if (c.modulus_q) os << "f=" << *c.modulus_q << " ";
  os << "b=" << c.nb.str() << " ";
  return os.str();
}

// part of w supported on primes dividing f
inline BigInt f_part(BigInt w, std::int64_t f) {
  BigInt out = 1;
  for (auto p : prime_divisors(f))
    while (w % p == 0) w /= p, out *= p;
  return out;
}

}  // namespace detail

// Denominators of every Delta_{n+1}(a) must be supported on primes dividing Nb.
inline CheckReport check_integrality(const StickContext& c) {
  CheckReport r;
  r.name = "integrality";
  for (int a = 0; a < c.zeta->group()->size(); ++a) {
    Rational d = delta(c, a);
    if (detail::supported_on(d.den(), c.nb)) r.ok();
    else r.fail(detail::witness_prefix(c) + "n=" + std::to_string(c.n) + " a=" + c.zeta->group()->label(a) + ": Delta=" + d.str());
  }
  return r;
}

inline BigInt w_for_context(const StickContext& c, int n) {
  if (c.modulus_q) return w_n_cyclotomic(*c.modulus_q, n);
  auto w = c.zeta->w_value(n);
  if (!w) throw PreconditionError("w_" + std::to_string(n) + " not supplied by the table");
  return *w;
}

enum class CongruenceModulus {
  full,        // w as stated
  f_supported, // only the primes dividing f
  prime_part    // only the given prime; for m >= 1 the part of gcd(w_n, w_m)
};

// Delta_{n+1}(a) == Na^{n-m} Nb^{n-m} Delta_{m+1}(a) mod w, where w = w_n(K_f) for m = 0
// and w = w_{min(m,n)}(K_f) for m >= 1. Denominators are cleared by a power of Nb first.
inline CheckReport check_congruence(const StickContext& c0, int n, int m, CongruenceModulus which = CongruenceModulus::full,
                                    std::int64_t prime = 0) {
  if (n < 0 || m < 0) throw PreconditionError("twists must be nonnegative");
  if (m > n) std::swap(m, n);
  StickContext c = with_twist(c0, n);
  CheckReport r;
  r.name = "congruence";
  if (n == m) {
    r.note = "n = m, congruence is an identity";
    for (int a = 0; a < c.zeta->group()->size(); ++a) r.ok();
    return r;
  }
  BigInt w = w_for_context(c, m == 0 ? n : m);
  if (which == CongruenceModulus::f_supported) {
    if (!c.modulus_q) throw PreconditionError("f-supported modulus needs K = Q");
    w = detail::f_part(w, *c.modulus_q);
  } else if (which == CongruenceModulus::prime_part) {
    if (prime < 2) throw PreconditionError("prime-part modulus needs a prime");
    if (m > 0) w = boost::multiprecision::gcd(w, w_for_context(c, n));
    BigInt part = 1;
    while (w % prime == 0) {
      w /= prime;
      part *= prime;
    }
    w = part;
  }
  BigInt w_next = w_for_context(c, n + 1);
  if (boost::multiprecision::gcd(c.nb, w) != 1 || boost::multiprecision::gcd(c.nb, w_next) != 1) {
    r.applicable = false;
    r.note = "Nb=" + c.nb.str() + " shares a factor with w=" + w.str() + " or w_" + std::to_string(n + 1) + "=" + w_next.str();
    return r;
  }
  const auto& g = *c.zeta->group();
  for (int a = 0; a < g.size(); ++a) {
    Rational lhs = delta(c, a, n);
    Rational rhs = Rational(big_pow(c.zeta->norm(a) * c.nb, static_cast<unsigned>(n - m))) * delta(c, a, m);
    BigInt den = boost::multiprecision::lcm(lhs.den(), rhs.den());
    BigInt clear = 1;
    while (clear % den != 0) clear *= c.nb;
    BigInt diff = (lhs * Rational(clear) - rhs * Rational(clear)).num();
    if (diff % w == 0) r.ok();
    else
      r.fail(detail::witness_prefix(c) + "n=" + std::to_string(n) + " m=" + std::to_string(m) + " a=" + g.label(a) +
             ": lhs=" + lhs.str() + " rhs=" + rhs.str() + " mod " + w.str());
  }
  return r;
}

// 1 - Nl^n sigma_l^{-1} in Q[G].
inline QGroupRing euler_factor(const GroupPtr& g, int l_class, const BigInt& nl, int n) {
  QGroupRing e = QGroupRing::scalar(g, Rational(1));
  e[g->inv(l_class)] -= Rational(big_pow(nl, static_cast<unsigned>(n)));
  return e;
}

inline QGroupRing euler_factor_q(const AbelianFieldQ& field, std::int64_t l, int n) {
  return euler_factor(field.galois_group(), field.artin_symbol(l), BigInt(l), n);
}

struct GroupRingSides {
  QGroupRing lhs, rhs;
  bool equal() const { return lhs == rhs; }
};

// Res Theta_n(b, f') versus prod_{l | f', l not | f} (1 - sigma_l^{-1} l^n) Theta_n(b, f), over G(Q(mu_f)/Q).
inline GroupRingSides conductor_restriction_sides(std::int64_t f_big, std::int64_t f, std::int64_t b, int n) {
  if (f_big % f) throw PreconditionError("f must divide f'");
  auto field = AbelianFieldQ::cyclotomic(f);
  QGroupRing lhs = theta(make_context_q(field, f_big, b, n));
  QGroupRing rhs = theta(make_context_q(field, f, b, n));
  for (auto l : prime_divisors(f_big))
    if (f % l) rhs = euler_factor_q(field, l, n) * rhs;
  return {lhs, rhs};
}

inline bool verify_conductor_restriction(std::int64_t f_big, std::int64_t f, std::int64_t b, int n) {
  return conductor_restriction_sides(f_big, f, b, n).equal();
}

// gamma_l: inverse of the l-adic Euler factor in (Z/l^k)[G(F/Q)], or 1 when l divides the conductor.
inline ZnGroupRing gamma_l(const AbelianFieldQ& field, std::int64_t l, int n, int k) {
  if (k < 1) throw PreconditionError("gamma_l needs k >= 1");
  if (!is_prime(l)) throw PreconditionError("gamma_l needs a prime l");
  std::int64_t lk = ipow(l, k);
  ResidueRing ring{lk};
  auto g = field.galois_group();
  auto one = ZnGroupRing::scalar(g, ring.one(), ring);
  if (field.conductor() % l == 0) return one;
  if (n == 0) throw ArithmeticError("Euler factor at n = 0 is not invertible mod l");
  // (1 - x)^{-1} = 1 + x + ... + x^{k-1}, x = l^n sigma_l^{-1} nilpotent mod l^k
  auto x = ZnGroupRing::basis(g, g->inv(field.artin_symbol(l)), ring).scaled(ring.from_int(powmod(l, n, lk)));
  auto sum = one, term = one;
  for (int i = 1; i < k; ++i) {
    term = term * x;
    sum += term;
  }
  return sum;
}

// Theta_n(b, f_0): Euler factor at l times Theta_n(b, f) when l does not divide f.
inline QGroupRing theta_level0(const StickContext& c, std::int64_t l) {
  if (!c.field_q || !c.modulus_q) throw PreconditionError("theta_level0 needs a K = Q context");
  QGroupRing t = theta(c);
  if (*c.modulus_q % l == 0) return t;
  return euler_factor_q(*c.field_q, l, c.n) * t;
}

// Res_{F_{k+1}/F_k} Theta_n(b, f_{k+1}) against Theta_n(b, f_k) (level 0 uses theta_level0).
inline GroupRingSides tower_restriction_sides(const AbelianFieldQ& base, std::int64_t b, int n, std::int64_t l, int k) {
  if (l == 2) throw PreconditionError("tower restriction is checked for odd l only");
  auto lo = tower_level(base, l, k);
  auto hi = tower_level(base, l, k + 1);
  QGroupRing top = theta(make_context_q(hi.field_k, hi.conductor_k, b, n));
  QGroupRing lhs = top.push_forward(lo.field_k.galois_group(), restriction_map(hi.field_k, lo.field_k));
  auto ctx = make_context_q(lo.field_k, lo.conductor_k, b, n);
  QGroupRing rhs = k == 0 ? theta_level0(ctx, l) : theta(ctx);
  return {lhs, rhs};
}

inline bool verify_tower_restriction(const AbelianFieldQ& base, std::int64_t b, int n, std::int64_t l, int k) {
  return tower_restriction_sides(base, b, n, l, k).equal();
}

// chi(Theta_n(b,f)) == (Nb^{n+1} - chi(b)) * (-B_{n+1, chi^{-1}} / (n+1)) for every character of G(F/Q),
// with B_{n+1,psi} = f^n sum_a psi(a) B_{n+1}(a/f) evaluated from Bernoulli polynomials directly.
// order_filter = 0 checks all characters, otherwise only those of order dividing it.
inline CheckReport character_check(const StickContext& c, int order_filter = 0) {
  if (!c.modulus_q) throw PreconditionError("character check needs a K = Q context");
  CheckReport r;
  r.name = "characters";
  const std::int64_t f = *c.modulus_q;
  const auto& g = *c.target;
  const int d = g.exponent();
  const auto& ray = c.zeta->field_q().value();
  QGroupRing th = theta(c);
  std::vector<Rational> bern(ray.degree());
  Rational fn = Rational(big_pow(BigInt(f), static_cast<unsigned>(c.n)));
  for (int a = 0; a < ray.degree(); ++a) {
    std::int64_t rep = ray.representative(a);
    bern[a] = bernoulli_poly(c.n + 1, Rational(BigInt(rep), BigInt(f)));
  }
  for (const auto& chi : enumerate_characters(g)) {
    if (order_filter) {
      std::int64_t ord = 1;
      for (int e : chi) ord = lcm64(ord, d / gcd64(d, e == 0 ? d : e));
      if (order_filter % ord) continue;
    }
    CyclotomicNumber lhs(d);
    for (int x = 0; x < g.size(); ++x)
      if (!th[x].is_zero()) lhs += CyclotomicNumber::root_power(d, chi[x]).scaled(th[x]);
    CyclotomicNumber bsum(d);
    for (int a = 0; a < ray.degree(); ++a) bsum += CyclotomicNumber::root_power(d, -chi[c.res[a]]).scaled(bern[a]);
    CyclotomicNumber lval = bsum.scaled(-fn / Rational(c.n + 1));
    CyclotomicNumber factor = CyclotomicNumber::constant(d, Rational(big_pow(c.nb, static_cast<unsigned>(c.n + 1)))) -
                              CyclotomicNumber::root_power(d, chi[c.res[c.b]]);
    CyclotomicNumber rhs = factor * lval;
    if (lhs == rhs) r.ok();
    else {
      std::string ex;
      for (int e : chi) ex += (ex.empty() ? "" : ",") + std::to_string(e);
      r.fail(detail::witness_prefix(c) + "n=" + std::to_string(c.n) + " chi=[" + ex + "]: " + lhs.str() + " vs " + rhs.str());
    }
  }
  return r;
}

}  // namespace stickel
