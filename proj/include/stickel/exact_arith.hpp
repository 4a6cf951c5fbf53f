#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stickel {

using BigInt = boost::multiprecision::cpp_int;

struct ArithmeticError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact rational in lowest terms with positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(int v) : v_(v) {}  // NOLINT
  Rational(long v) : v_(v) {}  // NOLINT
  Rational(long long v) : v_(v) {}  // NOLINT
  Rational(const BigInt& v) : v_(v) {}  // NOLINT
  Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw ArithmeticError("division by zero");
    v_ = den < 0 ? boost::multiprecision::cpp_rational(-num, -den) : boost::multiprecision::cpp_rational(num, den);
  }

  BigInt num() const { return boost::multiprecision::numerator(v_); }
  BigInt den() const { return boost::multiprecision::denominator(v_); }
  bool is_zero() const { return v_ == 0; }
  bool is_integer() const { return den() == 1; }
  int sign() const { return v_.sign(); }

  Rational operator-() const { return from_raw(-v_); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw ArithmeticError("division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }

  Rational pow(long e) const {
    if (e < 0) {
      if (is_zero()) throw ArithmeticError("division by zero");
      return Rational(1) / pow(-e);
    }
    Rational r(1), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  // "p/q", or "p" when integral.
  std::string str() const {
    if (is_integer()) return num().str();
    return num().str() + "/" + den().str();
  }

  static Rational parse(const std::string& s) {
    auto trim = [](std::string t) {
      auto b = t.find_first_not_of(" \t\r\n");
      auto e = t.find_last_not_of(" \t\r\n");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    std::string t = trim(s);
    auto slash = t.find('/');
    auto parse_int = [&](const std::string& x) -> BigInt {
      std::string y = trim(x);
      std::size_t i = 0;
      if (!y.empty() && (y[0] == '-' || y[0] == '+')) i = 1;
      if (i == y.size()) throw ParseError("not an integer: '" + x + "'");
      for (std::size_t j = i; j < y.size(); ++j)
        if (y[j] < '0' || y[j] > '9') throw ParseError("not an integer: '" + x + "'");
      return BigInt(y[0] == '+' ? y.substr(1) : y);
    };
    if (slash == std::string::npos) return Rational(parse_int(t));
    BigInt d = parse_int(t.substr(slash + 1));
    if (d == 0) throw ParseError("zero denominator in '" + s + "'");
    return Rational(parse_int(t.substr(0, slash)), d);
  }

 private:
  static Rational from_raw(boost::multiprecision::cpp_rational r) {
    Rational x;
    x.v_ = std::move(r);
    return x;
  }
  boost::multiprecision::cpp_rational v_;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

// ---- integers ----

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    auto t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  return a / gcd64(a, b) * b;
}

inline std::int64_t mod(std::int64_t a, std::int64_t n) {
  auto r = a % n;
  return r < 0 ? r + n : r;
}

inline std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t n) {
  return static_cast<std::int64_t>(static_cast<__int128>(mod(a, n)) * mod(b, n) % n);
}

inline std::int64_t powmod(std::int64_t a, std::int64_t e, std::int64_t n) {
  if (n == 1) return 0;
  if (e < 0) throw PreconditionError("negative exponent in powmod");
  std::int64_t r = 1, b = mod(a, n);
  while (e) {
    if (e & 1) r = mulmod(r, b, n);
    b = mulmod(b, b, n);
    e >>= 1;
  }
  return r;
}

inline std::int64_t ipow(std::int64_t a, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= a;
  return r;
}

// x^{-1} mod n; throws when gcd(x, n) != 1.
inline std::int64_t inverse_mod(std::int64_t x, std::int64_t n) {
  std::int64_t a = mod(x, n), m = n, u = 1, v = 0;
  while (m) {
    std::int64_t q = a / m;
    a -= q * m;
    std::swap(a, m);
    u -= q * v;
    std::swap(u, v);
  }
  if (a != 1 && n != 1) throw ArithmeticError("not invertible: " + std::to_string(x) + " mod " + std::to_string(n));
  return mod(u, n);
}

// a^e mod n for possibly negative e (a must then be a unit).
inline std::int64_t powmod_signed(std::int64_t a, std::int64_t e, std::int64_t n) {
  if (e >= 0) return powmod(a, e, n);
  return powmod(inverse_mod(a, n), -e, n);
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

// Prime factorization by trial division: (p, e) pairs in increasing order.
inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  if (n < 0) n = -n;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline std::vector<std::int64_t> prime_divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (auto& [p, e] : factorize(n)) out.push_back(p);
  return out;
}

inline std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 1; d <= n; ++d)
    if (n % d == 0) out.push_back(d);
  return out;
}

inline std::int64_t euler_phi(std::int64_t n) {
  std::int64_t r = n;
  for (auto p : prime_divisors(n)) r = r / p * (p - 1);
  return r;
}

// Multiplicative order of a modulo n (a a unit).
inline std::int64_t multiplicative_order(std::int64_t a, std::int64_t n) {
  if (n == 1) return 1;
  if (gcd64(a, n) != 1) throw PreconditionError("order of a non-unit");
  std::int64_t x = mod(a, n), k = 1;
  while (x != 1) x = mulmod(x, a, n), ++k;
  return k;
}

inline BigInt big_pow(const BigInt& a, unsigned e) { return boost::multiprecision::pow(a, e); }

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// v_p of a nonzero integer.
inline int l_valuation(BigInt x, std::int64_t p) {
  if (p < 2) throw PreconditionError("valuation at p < 2");
  if (x == 0) throw ArithmeticError("valuation of zero is infinite");
  int v = 0;
  while (x % p == 0) x /= p, ++v;
  return v;
}

// v_p of a nonzero rational (negative for denominators).
inline int l_valuation(const Rational& x, std::int64_t p) {
  if (x.is_zero()) throw ArithmeticError("valuation of zero is infinite");
  return l_valuation(x.num(), p) - l_valuation(x.den(), p);
}

// Reduction of a p-integral rational modulo n.
inline std::int64_t reduce_mod(const Rational& x, std::int64_t n) {
  if (n == 1) return 0;
  BigInt nn = n;
  BigInt d = x.den() % nn;
  std::int64_t dd = static_cast<std::int64_t>(d);
  if (gcd64(dd, n) != 1) throw ArithmeticError("denominator of " + x.str() + " is not a unit mod " + std::to_string(n));
  BigInt a = x.num() % nn;
  if (a < 0) a += nn;
  return mulmod(static_cast<std::int64_t>(a), inverse_mod(dd, n), n);
}

// (Z/f)^x as sorted residues in [1, f]; f = 1 gives [1].
inline std::vector<std::int64_t> unit_group(std::int64_t f) {
  if (f < 1) throw PreconditionError("modulus must be positive");
  if (f == 1) return {1};
  std::vector<std::int64_t> u;
  for (std::int64_t a = 1; a < f; ++a)
    if (gcd64(a, f) == 1) u.push_back(a);
  return u;
}

// ---- Bernoulli numbers (B_1 = -1/2) and polynomials ----

inline Rational bernoulli(unsigned n) {
  static std::mutex mu;
  static std::vector<Rational> table{Rational(1)};
  std::lock_guard<std::mutex> lock(mu);
  while (table.size() <= n) {
    unsigned m = static_cast<unsigned>(table.size());
    Rational s;
    for (unsigned j = 0; j < m; ++j) s += Rational(binomial(m + 1, j)) * table[j];
    table.push_back(-s / Rational(static_cast<long long>(m + 1)));
  }
  return table[n];
}

inline Rational bernoulli_poly(unsigned n, const Rational& x) {
  Rational r, xp(1);
  for (unsigned k = 0; k <= n; ++k) {
    r += Rational(binomial(n, n - k)) * bernoulli(n - k) * xp;
    xp *= x;
  }
  return r;
}

}  // namespace stickel
