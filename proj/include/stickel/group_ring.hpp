#pragma once

#include "stickel/exact_arith.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace stickel {

struct GroupAxiomError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite abelian group given by labels and a multiplication table.
class FiniteAbelianGroup {
 public:
  // full_check = false skips the cubic associativity scan for tables built from residue arithmetic.
  FiniteAbelianGroup(std::vector<std::string> labels, std::vector<std::vector<int>> mul, int identity, bool full_check = true)
      : labels_(std::move(labels)), mul_(std::move(mul)), identity_(identity) {
    validate(full_check);
  }

  static std::shared_ptr<const FiniteAbelianGroup> trivial() {
    return std::make_shared<const FiniteAbelianGroup>(std::vector<std::string>{"1"}, std::vector<std::vector<int>>{{0}}, 0);
  }

  int size() const { return static_cast<int>(labels_.size()); }
  int identity() const { return identity_; }
  int mul(int a, int b) const { return mul_[a][b]; }
  int inv(int a) const { return inv_[a]; }
  const std::string& label(int a) const { return labels_[a]; }
  const std::vector<std::string>& labels() const { return labels_; }

  int index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw PreconditionError("unknown group label '" + label + "'");
    return it->second;
  }

  int power(int a, std::int64_t e) const {
    int n = order_of(a);
    e = mod(e, n);
    int r = identity_;
    for (std::int64_t i = 0; i < e; ++i) r = mul(r, a);
    return r;
  }

  int order_of(int a) const {
    int k = 1;
    for (int x = a; x != identity_; x = mul(x, a)) ++k;
    return k;
  }

  int exponent() const {
    std::int64_t e = 1;
    for (int a = 0; a < size(); ++a) e = lcm64(e, order_of(a));
    return static_cast<int>(e);
  }

  // Elements of the subgroup generated by gens, in discovery order.
  std::vector<int> generated_subgroup(const std::vector<int>& gens) const {
    std::vector<char> seen(size(), 0);
    std::vector<int> out{identity_};
    seen[identity_] = 1;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (int g : gens) {
        int y = mul(out[i], g);
        if (!seen[y]) seen[y] = 1, out.push_back(y);
      }
    return out;
  }

  // Greedy generating set: each new generator lies outside the span of the previous ones.
  std::vector<int> generators() const {
    std::vector<int> gens;
    std::vector<int> span = generated_subgroup(gens);
    std::vector<char> in(size(), 0);
    for (int x : span) in[x] = 1;
    for (int a = 0; a < size(); ++a) {
      if (in[a]) continue;
      gens.push_back(a);
      span = generated_subgroup(gens);
      std::fill(in.begin(), in.end(), 0);
      for (int x : span) in[x] = 1;
    }
    return gens;
  }

 private:
  void validate(bool full_check) {
    const int n = static_cast<int>(labels_.size());
    if (n == 0) throw GroupAxiomError("group must be nonempty");
    if (static_cast<int>(mul_.size()) != n) throw GroupAxiomError("multiplication table has wrong number of rows");
    for (int i = 0; i < n; ++i) {
      if (!index_.emplace(labels_[i], i).second) throw GroupAxiomError("duplicate label '" + labels_[i] + "'");
      if (static_cast<int>(mul_[i].size()) != n) throw GroupAxiomError("multiplication table row " + labels_[i] + " has wrong length");
      for (int v : mul_[i])
        if (v < 0 || v >= n) throw GroupAxiomError("multiplication table entry out of range");
    }
    if (identity_ < 0 || identity_ >= n) throw GroupAxiomError("identity out of range");
    for (int a = 0; a < n; ++a)
      if (mul_[identity_][a] != a) throw GroupAxiomError("identity law fails at " + labels_[a]);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (mul_[a][b] != mul_[b][a]) throw GroupAxiomError("not commutative: " + labels_[a] + "*" + labels_[b]);
    for (int a = 0; a < n && full_check; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (mul_[mul_[a][b]][c] != mul_[a][mul_[b][c]])
            throw GroupAxiomError("not associative at (" + labels_[a] + "," + labels_[b] + "," + labels_[c] + ")");
    inv_.assign(n, -1);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b)
        if (mul_[a][b] == identity_) inv_[a] = b;
      if (inv_[a] < 0) throw GroupAxiomError("no inverse for " + labels_[a]);
    }
  }

  std::vector<std::string> labels_;
  std::vector<std::vector<int>> mul_;
  std::vector<int> inv_;
  std::map<std::string, int> index_;
  int identity_;
};

using GaloisGroup = FiniteAbelianGroup;
using GroupPtr = std::shared_ptr<const GaloisGroup>;

// Coefficient rings for the group ring.
struct RationalField {
  using value_type = Rational;
  value_type zero() const { return Rational(0); }
  value_type one() const { return Rational(1); }
  value_type from_int(std::int64_t v) const { return Rational(static_cast<long long>(v)); }
  value_type add(const value_type& a, const value_type& b) const { return a + b; }
  value_type sub(const value_type& a, const value_type& b) const { return a - b; }
  value_type mul(const value_type& a, const value_type& b) const { return a * b; }
  bool is_zero(const value_type& a) const { return a.is_zero(); }
  bool operator==(const RationalField&) const { return true; }
  std::string str(const value_type& a) const { return a.str(); }
};

struct ResidueRing {
  using value_type = std::int64_t;
  std::int64_t modulus = 1;
  value_type zero() const { return 0; }
  value_type one() const { return modulus == 1 ? 0 : 1; }
  value_type from_int(std::int64_t v) const { return mod(v, modulus); }
  value_type add(value_type a, value_type b) const { return mod(a + b, modulus); }
  value_type sub(value_type a, value_type b) const { return mod(a - b, modulus); }
  value_type mul(value_type a, value_type b) const { return mulmod(a, b, modulus); }
  bool is_zero(value_type a) const { return a == 0; }
  bool operator==(const ResidueRing& o) const { return modulus == o.modulus; }
  std::string str(value_type a) const { return std::to_string(a); }
};

// Element of R[G], coefficients indexed by group element.
template <class Ring>
class GroupRingElement {
 public:
  using value_type = typename Ring::value_type;

  GroupRingElement(GroupPtr g, Ring ring = Ring{}) : g_(std::move(g)), ring_(ring), c_(g_->size(), ring_.zero()) {}

  static GroupRingElement basis(GroupPtr g, int elem, Ring ring = Ring{}) {
    GroupRingElement x(std::move(g), ring);
    x.c_[elem] = ring.one();
    return x;
  }
  static GroupRingElement scalar(GroupPtr g, const value_type& s, Ring ring = Ring{}) {
    GroupRingElement x(g, ring);
    x.c_[g->identity()] = s;
    return x;
  }

  const GroupPtr& group() const { return g_; }
  const Ring& ring() const { return ring_; }
  const value_type& operator[](int i) const { return c_[i]; }
  value_type& operator[](int i) { return c_[i]; }
  const std::vector<value_type>& coefficients() const { return c_; }
  int size() const { return static_cast<int>(c_.size()); }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [&](const value_type& v) { return ring_.is_zero(v); });
  }

  GroupRingElement& operator+=(const GroupRingElement& o) {
    check(o);
    for (int i = 0; i < size(); ++i) c_[i] = ring_.add(c_[i], o.c_[i]);
    return *this;
  }
  GroupRingElement& operator-=(const GroupRingElement& o) {
    check(o);
    for (int i = 0; i < size(); ++i) c_[i] = ring_.sub(c_[i], o.c_[i]);
    return *this;
  }
  friend GroupRingElement operator+(GroupRingElement a, const GroupRingElement& b) { return a += b; }
  friend GroupRingElement operator-(GroupRingElement a, const GroupRingElement& b) { return a -= b; }

  friend GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b) {
    a.check(b);
    GroupRingElement r(a.g_, a.ring_);
    for (int i = 0; i < a.size(); ++i) {
      if (a.ring_.is_zero(a.c_[i])) continue;
      for (int j = 0; j < b.size(); ++j) {
        if (a.ring_.is_zero(b.c_[j])) continue;
        int k = a.g_->mul(i, j);
        r.c_[k] = a.ring_.add(r.c_[k], a.ring_.mul(a.c_[i], b.c_[j]));
      }
    }
    return r;
  }

  GroupRingElement scaled(const value_type& s) const {
    GroupRingElement r(*this);
    for (auto& v : r.c_) v = ring_.mul(v, s);
    return r;
  }

  friend bool operator==(const GroupRingElement& a, const GroupRingElement& b) {
    return (a.g_ == b.g_ || a.g_->labels() == b.g_->labels()) && a.ring_ == b.ring_ && a.c_ == b.c_;
  }
  friend bool operator!=(const GroupRingElement& a, const GroupRingElement& b) { return !(a == b); }

  // Push forward along a group homomorphism given by image indices.
  GroupRingElement push_forward(GroupPtr target, const std::vector<int>& hom) const {
    GroupRingElement r(target, ring_);
    for (int i = 0; i < size(); ++i) r.c_[hom[i]] = ring_.add(r.c_[hom[i]], c_[i]);
    return r;
  }

  // Involution sigma -> sigma^{-1}.
  GroupRingElement inverted() const {
    GroupRingElement r(g_, ring_);
    for (int i = 0; i < size(); ++i) r.c_[g_->inv(i)] = c_[i];
    return r;
  }

  // "σ1: 2, σ3: 2" style rendering; zero coefficients are kept so the layout is stable.
  std::string str(const std::string& prefix = "σ") const {
    std::ostringstream os;
    for (int i = 0; i < size(); ++i) {
      if (i) os << ", ";
      os << prefix << g_->label(i) << ": " << ring_.str(c_[i]);
    }
    return os.str();
  }

 private:
  void check(const GroupRingElement& o) const {
    if (g_ != o.g_ && g_->labels() != o.g_->labels()) throw PreconditionError("group ring elements over different groups");
    if (!(ring_ == o.ring_)) throw PreconditionError("group ring elements over different coefficient rings");
  }

  GroupPtr g_;
  Ring ring_;
  std::vector<value_type> c_;
};

using QGroupRing = GroupRingElement<RationalField>;
using ZnGroupRing = GroupRingElement<ResidueRing>;

inline bool is_integral(const QGroupRing& x) {
  return std::all_of(x.coefficients().begin(), x.coefficients().end(), [](const Rational& r) { return r.is_integer(); });
}

// Reduce an l-integral rational group ring element modulo n.
inline ZnGroupRing reduce(const QGroupRing& x, std::int64_t n) {
  ZnGroupRing r(x.group(), ResidueRing{n});
  for (int i = 0; i < x.size(); ++i) r[i] = reduce_mod(x[i], n);
  return r;
}

inline QGroupRing lift_to_rational(const ZnGroupRing& x) {
  QGroupRing r(x.group());
  for (int i = 0; i < x.size(); ++i) r[i] = Rational(static_cast<long long>(x[i]));
  return r;
}

// Z/o_1 x ... x Z/o_r with labels like "(1,0)"; a single factor gets labels "0", "1", ...
inline GroupPtr cyclic_product_group(const std::vector<int>& orders) {
  int n = 1;
  for (int o : orders) {
    if (o < 1) throw PreconditionError("cyclic factor orders must be positive");
    n *= o;
  }
  auto digits = [&](int x) {
    std::vector<int> d;
    for (int o : orders) d.push_back(x % o), x /= o;
    return d;
  };
  auto index = [&](const std::vector<int>& d) {
    int x = 0, s = 1;
    for (std::size_t i = 0; i < orders.size(); ++i) x += d[i] * s, s *= orders[i];
    return x;
  };
  std::vector<std::string> labels;
  std::vector<std::vector<int>> mul(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a) {
    auto da = digits(a);
    std::string s;
    for (std::size_t i = 0; i < da.size(); ++i) s += (i ? "," : "") + std::to_string(da[i]);
    labels.push_back(orders.size() == 1 ? s : "(" + s + ")");
    for (int b = 0; b < n; ++b) {
      auto db = digits(b);
      for (std::size_t i = 0; i < db.size(); ++i) db[i] = (da[i] + db[i]) % orders[i];
      mul[a][b] = index(db);
    }
  }
  return std::make_shared<const FiniteAbelianGroup>(std::move(labels), std::move(mul), 0, false);
}

}  // namespace stickel
