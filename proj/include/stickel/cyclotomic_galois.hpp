#pragma once

#include "stickel/exact_arith.hpp"
#include "stickel/group_ring.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace stickel {

struct NotSubfieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Abelian extension of Q: the fixed field of a subgroup H of (Z/f)^x inside Q(mu_f).
class AbelianFieldQ {
 public:
  // H is the subgroup generated by the given residues.
  static AbelianFieldQ make_field(std::int64_t f, const std::vector<std::int64_t>& generators) {
    if (f < 1) throw PreconditionError("modulus must be positive");
    std::set<std::int64_t> h{1};
    std::vector<std::int64_t> gens;
    for (auto g : generators) {
      if (gcd64(g, f) != 1) throw PreconditionError("generator " + std::to_string(g) + " is not a unit mod " + std::to_string(f));
      gens.push_back(f == 1 ? 1 : mod(g, f));
    }
    std::vector<std::int64_t> queue{1};
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (auto g : gens) {
        std::int64_t y = f == 1 ? 1 : mulmod(queue[i], g, f);
        if (h.insert(y).second) queue.push_back(y);
      }
    return AbelianFieldQ(f, std::vector<std::int64_t>(h.begin(), h.end()));
  }

  static AbelianFieldQ cyclotomic(std::int64_t f) { return make_field(f, {}); }

  // H given as a full set of residues (must be closed under multiplication).
  static AbelianFieldQ from_subgroup(std::int64_t f, std::vector<std::int64_t> h) {
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
    for (auto a : h)
      for (auto b : h)
        if (!std::binary_search(h.begin(), h.end(), f == 1 ? 1 : mulmod(a, b, f)))
          throw PreconditionError("subgroup not closed under multiplication");
    return AbelianFieldQ(f, std::move(h));
  }

  std::int64_t modulus() const { return f_; }
  const std::vector<std::int64_t>& subgroup() const { return h_; }
  int degree() const { return group_->size(); }
  const GroupPtr& galois_group() const { return group_; }
  std::int64_t representative(int idx) const { return reps_[idx]; }

  bool in_subgroup(std::int64_t a) const { return std::binary_search(h_.begin(), h_.end(), f_ == 1 ? 1 : mod(a, f_)); }

  // Class of sigma_a in G(F/Q).
  int artin_symbol(std::int64_t a) const {
    if (gcd64(a, f_) != 1) throw PreconditionError("Artin symbol of " + std::to_string(a) + " not coprime to " + std::to_string(f_));
    return class_of_[f_ == 1 ? 0 : mod(a, f_)];
  }

  std::int64_t conductor() const {
    for (auto d : divisors(f_)) {
      bool ok = true;
      for (std::int64_t x = 1; x <= f_ && ok; ++x)
        if (gcd64(x, f_) == 1 && mod(x - 1, d) == 0 && !in_subgroup(x)) ok = false;
      if (ok) return d;
    }
    return f_;
  }

  // Same field presented at its conductor.
  AbelianFieldQ normalized() const {
    std::int64_t c = conductor();
    std::set<std::int64_t> h;
    for (auto a : h_) h.insert(c == 1 ? 1 : mod(a, c));
    return from_subgroup(c, std::vector<std::int64_t>(h.begin(), h.end()));
  }

  // Preimage of H in (Z/M)^x for a multiple M of the modulus.
  std::vector<std::int64_t> lift_subgroup(std::int64_t m) const {
    if (m % f_) throw PreconditionError("lift target must be a multiple of the modulus");
    std::vector<std::int64_t> out;
    for (auto x : unit_group(m))
      if (in_subgroup(x)) out.push_back(x);
    return out;
  }

  std::string description() const {
    std::string s = "Q(mu_" + std::to_string(f_) + ")^<";
    for (std::size_t i = 0; i < h_.size(); ++i) s += (i ? "," : "") + std::to_string(h_[i]);
    return s + ">";
  }

  bool same_presentation(const AbelianFieldQ& o) const { return f_ == o.f_ && h_ == o.h_; }
  // equal as fields: compare conductor-normalized forms
  friend bool operator==(const AbelianFieldQ& a, const AbelianFieldQ& b) {
    return a.normalized().same_presentation(b.normalized());
  }

 private:
  AbelianFieldQ(std::int64_t f, std::vector<std::int64_t> h) : f_(f), h_(std::move(h)) {
    auto units = unit_group(f_);
    class_of_.assign(f_ == 1 ? 1 : f_, -1);
    for (auto a : units) {
      std::int64_t idx = f_ == 1 ? 0 : a;
      if (class_of_[idx] >= 0) continue;
      int c = static_cast<int>(reps_.size());
      reps_.push_back(a);
      for (auto x : h_) class_of_[f_ == 1 ? 0 : mulmod(a, x, f_)] = c;
    }
    const int n = static_cast<int>(reps_.size());
    std::vector<std::string> labels;
    for (auto r : reps_) labels.push_back(std::to_string(r));
    std::vector<std::vector<int>> mul(n, std::vector<int>(n));
    int id = 0;
    for (int i = 0; i < n; ++i) {
      if (in_subgroup(reps_[i])) id = i;
      for (int j = 0; j < n; ++j) mul[i][j] = class_of_[f_ == 1 ? 0 : mulmod(reps_[i], reps_[j], f_)];
    }
    group_ = std::make_shared<const GaloisGroup>(std::move(labels), std::move(mul), id, false);
  }

  std::int64_t f_;
  std::vector<std::int64_t> h_;
  std::vector<int> class_of_;
  std::vector<std::int64_t> reps_;
  GroupPtr group_;
};

// Restriction G(E/Q) -> G(F/Q) as image indices; throws unless F is a subfield of E.
inline std::vector<int> restriction_map(const AbelianFieldQ& e, const AbelianFieldQ& f) {
  std::int64_t m = lcm64(e.modulus(), f.modulus());
  std::vector<int> map(e.degree(), -1);
  for (auto x : unit_group(m)) {
    int ce = e.artin_symbol(x), cf = f.artin_symbol(x);
    if (map[ce] == -1) map[ce] = cf;
    else if (map[ce] != cf)
      throw NotSubfieldError(f.description() + " is not a subfield of " + e.description());
  }
  return map;
}

inline bool is_subfield(const AbelianFieldQ& f, const AbelianFieldQ& e) {
  try {
    restriction_map(e, f);
    return true;
  } catch (const NotSubfieldError&) {
    return false;
  }
}

inline AbelianFieldQ compositum(const AbelianFieldQ& a, const AbelianFieldQ& b) {
  std::int64_t m = lcm64(a.modulus(), b.modulus());
  std::vector<std::int64_t> h;
  for (auto x : unit_group(m))
    if (a.in_subgroup(x) && b.in_subgroup(x)) h.push_back(x);
  return AbelianFieldQ::from_subgroup(m, h);
}

// F(mu_{l^k}).
inline AbelianFieldQ adjoin_roots_of_unity(const AbelianFieldQ& f, std::int64_t l, int k) {
  if (!is_prime(l)) throw PreconditionError("adjoin_roots_of_unity needs a prime");
  return compositum(f, AbelianFieldQ::cyclotomic(ipow(l, k)));
}

namespace detail {

// Exponent of the image of H (lifted to lcm(f, q)) in (Z/q)^x, i.e. of G(F(mu_q)/F).
inline std::int64_t exponent_over(const AbelianFieldQ& f, std::int64_t q) {
  if (gcd64(q, f.modulus()) == 1) {
    // H lifts onto all of (Z/q)^x by CRT
    std::int64_t e = 1;
    for (auto y : unit_group(q)) e = lcm64(e, multiplicative_order(y, q));
    return e;
  }
  std::int64_t m = lcm64(f.modulus(), q);
  std::set<std::int64_t> image;
  for (auto x : unit_group(m))
    if (f.in_subgroup(x)) image.insert(q == 1 ? 0 : mod(x, q));
  std::int64_t e = 1;
  for (auto y : image) e = lcm64(e, q == 1 ? 1 : multiplicative_order(y, q));
  return e;
}

}  // namespace detail

// Largest m with G(F(mu_m)/F) of exponent dividing n, assembled prime by prime.
// Primes are scanned up to 2 n phi(f) + 2; for each prime the exponent over F(mu_{p^j})
// is nondecreasing in j, so the search stops at the first j where it fails to divide n.
inline BigInt w_n(const AbelianFieldQ& f, int n) {
  if (n < 1) throw PreconditionError("w_n needs n >= 1");
  BigInt w = 1;
  std::int64_t bound = 2 * static_cast<std::int64_t>(n) * euler_phi(f.modulus()) + 2;
  for (std::int64_t p = 2; p <= bound; ++p) {
    if (!is_prime(p)) continue;
    std::int64_t q = 1;
    while (n % detail::exponent_over(f, q * p) == 0) q *= p;
    w *= q;
  }
  return w;
}

// Stopping bound for the direct search. If G(F(mu_m)/F) has exponent dividing n and d = [F:Q], each
// odd p^e || m has phi(p^e) <= n d (the image of a cyclic group of index <= d), and 2^e || m has 2^e <= 4 n d.
// The product of the largest such prime powers bounds every admissible m.
inline std::int64_t w_n_search_bound(const AbelianFieldQ& f, int n) {
  if (n < 1) throw PreconditionError("w_n needs n >= 1");
  const std::int64_t nd = static_cast<std::int64_t>(n) * f.degree();
  std::int64_t bound = 1;
  for (std::int64_t pe = 2; pe <= 4 * nd; pe *= 2) bound = std::max<std::int64_t>(bound, pe);
  for (std::int64_t p = 3; p <= nd + 1; p += 2) {
    if (!is_prime(p)) continue;
    std::int64_t best = 1;
    for (std::int64_t pe = p; pe / p * (p - 1) <= nd; pe *= p) best = pe;
    if (bound > std::int64_t{1000000000} / best) throw PreconditionError("brute-force w_n search bound exceeds 10^9");
    bound *= best;
  }
  return bound;
}

// Direct search: largest m <= m_max with G(F(mu_m)/F) of exponent dividing n.
// Any admissible m divides the true w_n, so m_max >= w_n makes the answer exact.
inline std::int64_t w_n_bruteforce(const AbelianFieldQ& f, int n, std::int64_t m_max) {
  std::int64_t best = 1;
  for (std::int64_t m = 1; m <= m_max; ++m)
    if (n % detail::exponent_over(f, m) == 0) best = m;
  return best;
}

// ---- characters and the cyclotomic ring Q[x]/Phi_d ----

inline std::vector<BigInt> cyclotomic_polynomial(int d) {
  // x^d - 1 divided by Phi_e for proper divisors e
  std::vector<BigInt> num(d + 1, 0);
  num[0] = -1;
  num[d] = 1;
  for (int e = 1; e < d; ++e) {
    if (d % e) continue;
    auto den = cyclotomic_polynomial(e);
    int dn = static_cast<int>(num.size()) - 1, dd = static_cast<int>(den.size()) - 1;
    std::vector<BigInt> q(dn - dd + 1, 0);
    for (int i = dn; i >= dd; --i) {
      BigInt c = num[i];  // den monic
      q[i - dd] = c;
      for (int j = 0; j <= dd; ++j) num[i - dd + j] -= c * den[j];
    }
    num = q;
  }
  return num;
}

class CyclotomicNumber {
 public:
  explicit CyclotomicNumber(int d) : d_(d), phi_(cyclotomic_polynomial(d)), c_(phi_.size() - 1, Rational(0)) {}

  static CyclotomicNumber root_power(int d, std::int64_t e) {
    CyclotomicNumber z(d);
    std::vector<Rational> poly(static_cast<std::size_t>(mod(e, d)) + 1, Rational(0));
    poly.back() = 1;
    z.assign_reduced(poly);
    return z;
  }
  static CyclotomicNumber constant(int d, const Rational& r) {
    CyclotomicNumber z(d);
    z.c_[0] = r;
    return z;
  }

  int order() const { return d_; }
  const std::vector<Rational>& coefficients() const { return c_; }

  CyclotomicNumber& operator+=(const CyclotomicNumber& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  CyclotomicNumber& operator-=(const CyclotomicNumber& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend CyclotomicNumber operator+(CyclotomicNumber a, const CyclotomicNumber& b) { return a += b; }
  friend CyclotomicNumber operator-(CyclotomicNumber a, const CyclotomicNumber& b) { return a -= b; }
  friend CyclotomicNumber operator*(const CyclotomicNumber& a, const CyclotomicNumber& b) {
    std::vector<Rational> prod(a.c_.size() + b.c_.size(), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) prod[i + j] += a.c_[i] * b.c_[j];
    }
    CyclotomicNumber r(a.d_);
    r.assign_reduced(prod);
    return r;
  }
  CyclotomicNumber scaled(const Rational& s) const {
    CyclotomicNumber r(*this);
    for (auto& x : r.c_) x *= s;
    return r;
  }
  friend bool operator==(const CyclotomicNumber& a, const CyclotomicNumber& b) { return a.d_ == b.d_ && a.c_ == b.c_; }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "(" + c_[i].str() + ")";
      if (i) s += "*z^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
  }

 private:
  void assign_reduced(std::vector<Rational> poly) {
    const int deg = static_cast<int>(phi_.size()) - 1;
    for (int i = static_cast<int>(poly.size()) - 1; i >= deg; --i) {
      if (poly[i].is_zero()) continue;
      Rational c = poly[i];
      for (int j = 0; j <= deg; ++j) poly[i - deg + j] -= c * Rational(phi_[j]);
    }
    for (int i = 0; i < deg; ++i) c_[i] = i < static_cast<int>(poly.size()) ? poly[i] : Rational(0);
  }

  int d_;
  std::vector<BigInt> phi_;
  std::vector<Rational> c_;
};

// All characters G -> mu_d with d = exponent(G), each as exponents e(g) with chi(g) = zeta_d^{e(g)}.
inline std::vector<std::vector<int>> enumerate_characters(const GaloisGroup& g) {
  const int d = g.exponent();
  auto gens = g.generators();
  std::vector<std::vector<int>> out;
  std::function<void(std::size_t, std::vector<int>)> extend = [&](std::size_t t, std::vector<int> chi) {
    if (t == gens.size()) {
      out.push_back(chi);
      return;
    }
    int x = gens[t];
    int r = 1, y = x;
    while (chi[y] < 0) y = g.mul(y, x), ++r;
    for (int e = 0; e < d; ++e) {
      if (mod(static_cast<std::int64_t>(r) * e - chi[y], d) != 0) continue;
      std::vector<int> next = chi;
      std::vector<int> span;
      for (int a = 0; a < g.size(); ++a)
        if (chi[a] >= 0) span.push_back(a);
      int xp = g.identity();
      for (int i = 0; i < r; ++i) {
        for (int a : span) next[g.mul(xp, a)] = static_cast<int>(mod(chi[a] + static_cast<std::int64_t>(i) * e, d));
        xp = g.mul(xp, x);
      }
      extend(t + 1, std::move(next));
    }
  };
  std::vector<int> start(g.size(), -1);
  start[g.identity()] = 0;
  extend(0, start);
  return out;
}

}  // namespace stickel

namespace stickel {

struct TowerLevel {
  AbelianFieldQ base;
  std::int64_t l;
  int k;
  AbelianFieldQ field_k;
  std::int64_t conductor_k;
};

inline TowerLevel tower_level(const AbelianFieldQ& base, std::int64_t l, int k) {
  auto fk = k == 0 ? base : adjoin_roots_of_unity(base, l, k);
  auto c = fk.conductor();
  return TowerLevel{base, l, k, fk, c};
}

}  // namespace stickel
