#pragma once

#include "stickel/cyclotomic_galois.hpp"
#include "stickel/exact_arith.hpp"
#include "stickel/group_ring.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace stickel {

// zeta_f(a, -n) for K = Q via the Hurwitz closed form -f^n B_{n+1}(a/f) / (n+1).
// a is reduced into (0, f]; f = 1 gives the Riemann value zeta(-n).
inline Rational zeta_q(std::int64_t f, std::int64_t a, int n) {
  if (f < 1) throw PreconditionError("modulus must be positive");
  if (n < 0) throw PreconditionError("twist must be nonnegative");
  if (gcd64(a, f) != 1) throw PreconditionError("class " + std::to_string(a) + " not coprime to " + std::to_string(f));
  std::int64_t r = mod(a, f);
  if (r == 0) r = f;
  Rational x{BigInt(r), BigInt(f)};
  return -Rational(big_pow(BigInt(f), static_cast<unsigned>(n))) * bernoulli_poly(n + 1, x) / Rational(n + 1);
}

// zeta(-n) = -B_{n+1}(1)/(n+1); differs from -B_{n+1}/(n+1) only at n = 0
inline Rational riemann_zeta_negative(int n) { return -bernoulli_poly(n + 1, Rational(1)) / Rational(n + 1); }

struct TableFormatError : ParseError {
  using ParseError::ParseError;
};
struct TableIncompleteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AuxPrime {
  int cls;
  BigInt norm;
};

// Exact values zeta_f(a, -n) over the ray class group mod f.
class PartialZetaTable {
 public:
  PartialZetaTable(GroupPtr g, std::string description) : g_(std::move(g)), desc_(std::move(description)), norms_(g_->size(), 0) {}

  const GroupPtr& group() const { return g_; }
  const std::string& description() const { return desc_; }
  const std::optional<AbelianFieldQ>& field_q() const { return field_q_; }
  void set_field_q(AbelianFieldQ f) { field_q_ = std::move(f); }

  // class index of an integer (K = Q tables only)
  int class_of(std::int64_t a) const {
    if (!field_q_) throw PreconditionError("integer classes need a K = Q table");
    return field_q_->artin_symbol(a);
  }

  bool has(int cls, int n) const { return entries_.count({cls, n}) > 0; }
  const Rational& value(int cls, int n) const {
    auto it = entries_.find({cls, n});
    if (it == entries_.end())
      throw TableIncompleteError("no zeta entry for class " + g_->label(cls) + " at n = " + std::to_string(n));
    return it->second;
  }
  void set_value(int cls, int n, Rational v) { entries_[{cls, n}] = std::move(v); }
  const std::map<std::pair<int, int>, Rational>& entries() const { return entries_; }

  std::vector<int> twists() const {
    std::set<int> ns;
    for (auto& [k, v] : entries_) ns.insert(k.second);
    return {ns.begin(), ns.end()};
  }

  const BigInt& norm(int cls) const { return norms_[cls]; }
  void set_norm(int cls, BigInt v) { norms_[cls] = std::move(v); }

  std::optional<BigInt> w_value(int n) const {
    auto it = w_.find(n);
    if (it == w_.end()) return std::nullopt;
    return it->second;
  }
  void set_w(int n, BigInt v) { w_[n] = std::move(v); }
  const std::map<int, BigInt>& w_values() const { return w_; }

  const std::map<std::string, AuxPrime>& aux_primes() const { return aux_; }
  void set_aux(const std::string& label, AuxPrime p) { aux_[label] = std::move(p); }

  friend bool operator==(const PartialZetaTable& a, const PartialZetaTable& b) {
    return a.g_->labels() == b.g_->labels() && a.entries_ == b.entries_ && a.norms_ == b.norms_ && a.w_ == b.w_ &&
           a.aux_.size() == b.aux_.size();
  }

 private:
  GroupPtr g_;
  std::string desc_;
  std::optional<AbelianFieldQ> field_q_;
  std::map<std::pair<int, int>, Rational> entries_;
  std::vector<BigInt> norms_;
  std::map<int, BigInt> w_;
  std::map<std::string, AuxPrime> aux_;
};

using TablePtr = std::shared_ptr<const PartialZetaTable>;

// w_n(Q(mu_f)) is needed over and over in sweeps
inline BigInt w_n_cyclotomic(std::int64_t f, int n) {
  static std::mutex mu;
  static std::map<std::pair<std::int64_t, int>, BigInt> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({f, n});
    if (it != cache.end()) return it->second;
  }
  BigInt w = w_n(AbelianFieldQ::cyclotomic(f), n);
  std::lock_guard<std::mutex> lock(mu);
  cache[{f, n}] = w;
  return w;
}

// Table over (Z/f)^x for 0 <= n <= n_max. w_values for 1 <= n <= n_max + 1 when with_w is set.
inline PartialZetaTable build_table_q(std::int64_t f, int n_max, bool with_w = true) {
  auto field = AbelianFieldQ::cyclotomic(f);
  PartialZetaTable t(field.galois_group(), "Q, modulus " + std::to_string(f));
  t.set_field_q(field);
  for (int c = 0; c < field.degree(); ++c) {
    std::int64_t a = field.representative(c);
    t.set_norm(c, a);
    for (int n = 0; n <= n_max; ++n) t.set_value(c, n, zeta_q(f, a, n));
  }
  if (with_w)
    for (int n = 1; n <= n_max + 1; ++n) t.set_w(n, w_n_cyclotomic(f, n));
  return t;
}

// Shared, memoized K = Q tables (w values filled lazily through w_n_cyclotomic).
inline TablePtr table_q(std::int64_t f, int n_max) {
  static std::mutex mu;
  static std::map<std::int64_t, TablePtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(f);
  if (it != cache.end() && it->second->has(0, n_max)) return it->second;
  int top = std::max(n_max, 6);
  auto t = std::make_shared<const PartialZetaTable>(build_table_q(f, top, false));
  cache[f] = t;
  return t;
}

// ---- text format ----
//
//   field: <free text>
//   order: <N>
//   labels: <l1> <l2> ...
//   identity: <label>
//   mul: a*b=c            (one line per ordered pair)
//   inv: a b
//   norm | <label> | <N>
//   <label> | <n> | <p/q>
//   w | <n> | <integer>
//   prime | <name> | <label> | <N>
//
// '#' starts a comment. Each kind of key may appear once.

inline std::string format_table(const PartialZetaTable& t) {
  std::ostringstream os;
  const auto& g = *t.group();
  os << "field: " << t.description() << "\n";
  os << "order: " << g.size() << "\n";
  os << "labels:";
  for (auto& l : g.labels()) os << " " << l;
  os << "\nidentity: " << g.label(g.identity()) << "\n";
  for (int a = 0; a < g.size(); ++a)
    for (int b = 0; b < g.size(); ++b) os << "mul: " << g.label(a) << "*" << g.label(b) << "=" << g.label(g.mul(a, b)) << "\n";
  for (int a = 0; a < g.size(); ++a) os << "inv: " << g.label(a) << " " << g.label(g.inv(a)) << "\n";
  for (int a = 0; a < g.size(); ++a) os << "norm | " << g.label(a) << " | " << t.norm(a).str() << "\n";
  for (auto& [k, v] : t.entries()) os << g.label(k.first) << " | " << k.second << " | " << v.str() << "\n";
  for (auto& [n, w] : t.w_values()) os << "w | " << n << " | " << w.str() << "\n";
  for (auto& [name, p] : t.aux_primes()) os << "prime | " << name << " | " << g.label(p.cls) << " | " << p.norm.str() << "\n";
  return os.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) out.push_back(trim(cur)), cur.clear();
    else cur += c;
  }
  out.push_back(trim(cur));
  return out;
}

inline BigInt parse_positive(const std::string& s, int line) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw TableFormatError("line " + std::to_string(line) + ": expected a positive integer, got '" + s + "'");
  BigInt v(s);
  if (v <= 0) throw TableFormatError("line " + std::to_string(line) + ": expected a positive integer, got '" + s + "'");
  return v;
}

inline int parse_small(const std::string& s, int line) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 6)
    throw TableFormatError("line " + std::to_string(line) + ": expected a small nonnegative integer, got '" + s + "'");
  return std::stoi(s);
}

}  // namespace detail

// Parse a table document. Throws TableFormatError (syntax, duplicates), GroupAxiomError,
// or TableIncompleteError (missing entries).
inline PartialZetaTable load_zeta_table(const std::string& doc) {
  using detail::trim;
  std::string desc;
  std::optional<int> order;
  std::vector<std::string> labels;
  std::optional<std::string> identity;
  std::map<std::pair<std::string, std::string>, std::string> mul;
  std::map<std::string, std::string> inv;
  std::map<std::string, BigInt> norms;
  std::map<std::pair<std::string, int>, Rational> entries;
  std::map<int, BigInt> w;
  std::map<std::string, std::pair<std::string, BigInt>> primes;
  bool have_field = false, have_labels = false;

  std::istringstream in(doc);
  std::string raw;
  int ln = 0;
  auto fail = [&](const std::string& msg) { throw TableFormatError("line " + std::to_string(ln) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++ln;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.find('|') != std::string::npos) {
      auto parts = detail::split(line, '|');
      if (parts[0] == "norm") {
        if (parts.size() != 3) fail("norm line needs 'norm | label | N'");
        if (!norms.emplace(parts[1], detail::parse_positive(parts[2], ln)).second) fail("duplicate norm for " + parts[1]);
      } else if (parts[0] == "w") {
        if (parts.size() != 3) fail("w line needs 'w | n | integer'");
        if (!w.emplace(detail::parse_small(parts[1], ln), detail::parse_positive(parts[2], ln)).second) fail("duplicate w value");
      } else if (parts[0] == "prime") {
        if (parts.size() != 4) fail("prime line needs 'prime | name | class | N'");
        if (!primes.emplace(parts[1], std::make_pair(parts[2], detail::parse_positive(parts[3], ln))).second)
          fail("duplicate prime " + parts[1]);
      } else {
        if (parts.size() != 3) fail("entry line needs 'class | n | value'");
        Rational v;
        try {
          v = Rational::parse(parts[2]);
        } catch (const ParseError& e) {
          fail(std::string("bad value: ") + e.what());
        }
        if (parts[2].find('.') != std::string::npos) fail("decimal values are not allowed");
        if (!entries.emplace(std::make_pair(parts[0], detail::parse_small(parts[1], ln)), v).second)
          fail("duplicate entry for class " + parts[0] + " at n = " + parts[1]);
      }
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) fail("unrecognized line '" + line + "'");
    std::string key = trim(line.substr(0, colon)), val = trim(line.substr(colon + 1));
    if (key == "field") {
      if (have_field) fail("duplicate field line");
      have_field = true;
      desc = val;
    } else if (key == "order") {
      if (order) fail("duplicate order line");
      order = detail::parse_small(val, ln);
    } else if (key == "labels") {
      if (have_labels) fail("duplicate labels line");
      have_labels = true;
      std::istringstream ls(val);
      for (std::string l; ls >> l;) {
        if (l == "w" || l == "prime" || l == "norm") fail("reserved label '" + l + "'");
        labels.push_back(l);
      }
    } else if (key == "identity") {
      if (identity) fail("duplicate identity line");
      identity = val;
    } else if (key == "mul") {
      auto eq = val.find('=');
      auto star = val.find('*');
      if (eq == std::string::npos || star == std::string::npos || star > eq) fail("mul line needs 'a*b=c'");
      auto a = trim(val.substr(0, star)), b = trim(val.substr(star + 1, eq - star - 1)), c = trim(val.substr(eq + 1));
      if (!mul.emplace(std::make_pair(a, b), c).second) fail("duplicate product " + a + "*" + b);
    } else if (key == "inv") {
      std::istringstream ls(val);
      std::string a, b, extra;
      if (!(ls >> a >> b) || (ls >> extra)) fail("inv line needs 'a b'");
      if (!inv.emplace(a, b).second) fail("duplicate inverse for " + a);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  ln = 0;
  if (!have_labels || labels.empty()) fail("missing labels");
  if (!identity) fail("missing identity");
  if (order && *order != static_cast<int>(labels.size())) fail("order does not match the number of labels");

  const int n = static_cast<int>(labels.size());
  std::map<std::string, int> idx;
  for (int i = 0; i < n; ++i)
    if (!idx.emplace(labels[i], i).second) throw GroupAxiomError("duplicate label '" + labels[i] + "'");
  auto find = [&](const std::string& l, const char* what) {
    auto it = idx.find(l);
    if (it == idx.end()) throw TableFormatError(std::string("unknown label '") + l + "' in " + what);
    return it->second;
  };
  std::vector<std::vector<int>> table(n, std::vector<int>(n, -1));
  for (auto& [ab, c] : mul) table[find(ab.first, "mul")][find(ab.second, "mul")] = find(c, "mul");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (table[i][j] < 0) throw TableIncompleteError("missing product " + labels[i] + "*" + labels[j]);
  auto g = std::make_shared<const GaloisGroup>(labels, table, find(*identity, "identity"));
  for (auto& [a, b] : inv)
    if (g->inv(find(a, "inv")) != find(b, "inv")) throw GroupAxiomError("inverse pair " + a + " " + b + " contradicts the table");

  PartialZetaTable t(g, desc);
  for (auto& [l, v] : norms) t.set_norm(find(l, "norm"), v);
  for (int i = 0; i < n; ++i)
    if (!norms.count(labels[i])) throw TableIncompleteError("missing norm for class " + labels[i]);
  std::set<int> ns;
  for (auto& [k, v] : entries) {
    t.set_value(find(k.first, "entry"), k.second, v);
    ns.insert(k.second);
  }
  for (int nn : ns)
    for (int i = 0; i < n; ++i)
      if (!t.has(i, nn)) throw TableIncompleteError("missing entry for class " + labels[i] + " at n = " + std::to_string(nn));
  for (auto& [k, v] : w) t.set_w(k, v);
  for (auto& [name, p] : primes) t.set_aux(name, AuxPrime{find(p.first, "prime"), p.second});
  return t;
}

// zeta_f(a,-n) - l^n zeta_f(l^{-1} a,-n) == sum over a' = a (mod f) of zeta_{lf}(a',-n).
inline bool verify_distribution(const PartialZetaTable& tf, const PartialZetaTable& tlf, std::int64_t l, int n, std::int64_t a) {
  if (!tf.field_q() || !tlf.field_q()) throw PreconditionError("distribution check needs K = Q tables");
  std::int64_t f = tf.field_q()->modulus();
  if (tlf.field_q()->modulus() != l * f) throw PreconditionError("second table must be at modulus l*f");
  if (!is_prime(l) || f % l == 0) throw PreconditionError("l must be a prime not dividing f");
  std::int64_t linv_a = mulmod(inverse_mod(l, f), a, f);
  Rational lhs = tf.value(tf.class_of(a), n) - Rational(big_pow(BigInt(l), static_cast<unsigned>(n))) * tf.value(tf.class_of(f == 1 ? 1 : linv_a), n);
  Rational rhs;
  for (std::int64_t x = 1; x <= l * f; ++x)
    if (gcd64(x, l * f) == 1 && mod(x - a, f) == 0) rhs += tlf.value(tlf.class_of(x), n);
  return lhs == rhs;
}

inline bool verify_distribution(std::int64_t f, std::int64_t l, int n, std::int64_t a) {
  return verify_distribution(*table_q(f, n), *table_q(l * f, n), l, n, a);
}

}  // namespace stickel
