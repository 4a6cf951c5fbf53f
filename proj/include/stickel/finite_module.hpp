#pragma once

#include "stickel/exact_arith.hpp"
#include "stickel/group_ring.hpp"
#include "stickel/linalg.hpp"

#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace stickel {

struct ModuleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite abelian group Z/o_1 + ... + Z/o_r with a G-action by integer matrices
// (column j = image of the j-th generator). Matrices are stored for every group element.
class FiniteGModule {
 public:
  // Action given on a generating set of G; the rest is filled in by multiplying out.
  FiniteGModule(GroupPtr g, std::vector<std::int64_t> orders, const std::vector<std::pair<int, Mat64>>& gens)
      : g_(std::move(g)), orders_(std::move(orders)) {
    for (auto o : orders_)
      if (o < 1) throw ModuleError("cyclic factor orders must be positive");
    const int n = g_->size();
    mats_.assign(n, Mat64{});
    mats_[g_->identity()] = identity64();
    std::vector<int> queue{g_->identity()};
    std::vector<char> seen(n, 0);
    seen[g_->identity()] = 1;
    for (auto& [s, m] : gens) {
      check_shape(m, "generator " + g_->label(s));
      check_defined(m, "generator " + g_->label(s));
    }
    for (std::size_t qi = 0; qi < queue.size(); ++qi)
      for (auto& [s, m] : gens) {
        int y = g_->mul(s, queue[qi]);
        Mat64 prod = mul(m, mats_[queue[qi]]);
        if (!seen[y]) {
          seen[y] = 1;
          mats_[y] = prod;
          queue.push_back(y);
        } else if (!equal_mod(mats_[y], prod)) {
          throw ModuleError("action is not well defined at " + g_->label(y) + " (relations of G fail)");
        }
      }
    if (static_cast<int>(queue.size()) != n) throw ModuleError("listed generators do not generate the group");
    for (int a = 0; a < n; ++a) check_defined(mats_[a], "element " + g_->label(a));
  }

  static std::shared_ptr<const FiniteGModule> trivial_action(GroupPtr g, std::vector<std::int64_t> orders) {
    Mat64 id(orders.size(), std::vector<std::int64_t>(orders.size(), 0));
    for (std::size_t i = 0; i < orders.size(); ++i) id[i][i] = 1;
    std::vector<std::pair<int, Mat64>> gens;
    for (int s : g->generators()) gens.emplace_back(s, id);
    return std::make_shared<const FiniteGModule>(g, orders, gens);
  }

  // Build from a function giving the matrix of each generator in g->generators().
  static std::shared_ptr<const FiniteGModule> from_generators(GroupPtr g, std::vector<std::int64_t> orders,
                                                              const std::function<Mat64(int)>& gen_matrix) {
    std::vector<std::pair<int, Mat64>> gens;
    for (int s : g->generators()) gens.emplace_back(s, gen_matrix(s));
    return std::make_shared<const FiniteGModule>(g, orders, gens);
  }

  const GroupPtr& group() const { return g_; }
  const std::vector<std::int64_t>& orders() const { return orders_; }
  int rank() const { return static_cast<int>(orders_.size()); }
  const Mat64& matrix(int g) const { return mats_[g]; }

  BigInt size() const {
    BigInt s = 1;
    for (auto o : orders_) s *= o;
    return s;
  }
  std::int64_t exponent() const {
    std::int64_t e = 1;
    for (auto o : orders_) e = lcm64(e, o);
    return e;
  }

  Elem zero() const { return Elem(orders_.size(), 0); }
  Elem basis(int i) const {
    Elem x = zero();
    x[i] = orders_[i] == 1 ? 0 : 1;
    return x;
  }
  Elem normalize(Elem x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = mod(x[i], orders_[i]);
    return x;
  }
  bool is_zero(const Elem& x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (mod(x[i], orders_[i])) return false;
    return true;
  }
  bool equal(const Elem& a, const Elem& b) const {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (mod(a[i] - b[i], orders_[i])) return false;
    return true;
  }
  Elem add(const Elem& a, const Elem& b) const {
    Elem r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = mod(a[i] + b[i], orders_[i]);
    return r;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = mod(a[i] - b[i], orders_[i]);
    return r;
  }
  Elem scale(const Elem& a, std::int64_t s) const {
    Elem r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = mulmod(a[i], s, orders_[i]);
    return r;
  }

  Elem act(int g, const Elem& x) const { return apply_matrix(mats_[g], x, orders_); }

  // Group-ring actions; coefficients are reduced modulo the exponent.
  Elem act(const ZnGroupRing& r, const Elem& x) const {
    if (r.ring().modulus % exponent() != 0) throw ModuleError("ring modulus does not kill the module");
    return act_coeffs(r, [&](int i) { return r[i]; }, x);
  }
  Elem act(const QGroupRing& r, const Elem& x) const {
    std::int64_t e = exponent();
    return act_coeffs(r, [&](int i) { return reduce_mod(r[i], e); }, x);
  }

  // Mixed-radix enumeration of all elements.
  void for_each_element(const std::function<void(const Elem&)>& fn) const {
    Elem x = zero();
    while (true) {
      fn(x);
      std::size_t i = 0;
      for (; i < x.size(); ++i) {
        if (++x[i] < orders_[i]) break;
        x[i] = 0;
      }
      if (i == x.size()) return;
    }
  }

  std::string describe() const {
    std::ostringstream os;
    if (orders_.empty()) return "0";
    for (std::size_t i = 0; i < orders_.size(); ++i) os << (i ? " + " : "") << "Z/" << orders_[i];
    return os.str();
  }

  static Elem apply_matrix(const Mat64& m, const Elem& x, const std::vector<std::int64_t>& target_orders) {
    Elem y(target_orders.size(), 0);
    for (std::size_t i = 0; i < target_orders.size(); ++i) {
      __int128 acc = 0;
      for (std::size_t j = 0; j < x.size(); ++j) acc += static_cast<__int128>(m[i][j]) * x[j];
      std::int64_t o = target_orders[i];
      __int128 r = acc % o;
      y[i] = static_cast<std::int64_t>(r < 0 ? r + o : r);
    }
    return y;
  }

 private:
  template <class R, class F>
  Elem act_coeffs(const R& r, F coeff, const Elem& x) const {
    Elem acc = zero();
    for (int i = 0; i < r.size(); ++i) {
      std::int64_t c = coeff(i);
      if (c == 0) continue;
      acc = add(acc, scale(act(i, x), c));
    }
    return acc;
  }
  Mat64 identity64() const {
    Mat64 m(orders_.size(), std::vector<std::int64_t>(orders_.size(), 0));
    for (std::size_t i = 0; i < orders_.size(); ++i) m[i][i] = 1;
    return m;
  }
  Mat64 mul(const Mat64& a, const Mat64& b) const {
    const std::size_t n = orders_.size();
    Mat64 c(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        __int128 acc = 0;
        for (std::size_t k = 0; k < n; ++k) acc += static_cast<__int128>(a[i][k]) * b[k][j];
        __int128 r = acc % orders_[i];
        c[i][j] = static_cast<std::int64_t>(r < 0 ? r + orders_[i] : r);
      }
    return c;
  }
  bool equal_mod(const Mat64& a, const Mat64& b) const {
    for (std::size_t i = 0; i < orders_.size(); ++i)
      for (std::size_t j = 0; j < orders_.size(); ++j)
        if (mod(a[i][j] - b[i][j], orders_[i])) return false;
    return true;
  }
  void check_shape(const Mat64& m, const std::string& what) const {
    if (m.size() != orders_.size()) throw ModuleError("matrix for " + what + " has wrong size");
    for (auto& row : m)
      if (row.size() != orders_.size()) throw ModuleError("matrix for " + what + " has wrong size");
  }
  // column j must be killed by o_j
  void check_defined(const Mat64& m, const std::string& what) const {
    for (std::size_t j = 0; j < orders_.size(); ++j)
      for (std::size_t i = 0; i < orders_.size(); ++i)
        if (mulmod(orders_[j], m[i][j], orders_[i]) != 0)
          throw ModuleError("action of " + what + " is not well defined on the factor orders");
  }

  GroupPtr g_;
  std::vector<std::int64_t> orders_;
  std::vector<Mat64> mats_;
};

using ModPtr = std::shared_ptr<const FiniteGModule>;

// Homomorphism src -> tgt, equivariant along a group map (identity when hom is empty).
class ModuleMap {
 public:
  ModuleMap(ModPtr src, ModPtr tgt, Mat64 m, std::vector<int> hom = {}) : src_(std::move(src)), tgt_(std::move(tgt)), m_(std::move(m)), hom_(std::move(hom)) {
    if (m_.size() != static_cast<std::size_t>(tgt_->rank())) throw ModuleError("map matrix has wrong number of rows");
    for (auto& row : m_)
      if (row.size() != static_cast<std::size_t>(src_->rank())) throw ModuleError("map matrix has wrong number of columns");
    for (int j = 0; j < src_->rank(); ++j) {
      Elem col(tgt_->rank());
      for (int i = 0; i < tgt_->rank(); ++i) col[i] = mulmod(src_->orders()[j], m_[i][j], tgt_->orders()[i]);
      if (!tgt_->is_zero(col)) throw ModuleError("map is not well defined on generator " + std::to_string(j));
    }
    if (hom_.empty() && src_->group()->labels() != tgt_->group()->labels())
      throw ModuleError("map between modules over different groups needs a group homomorphism");
  }

  static ModuleMap zero(ModPtr src, ModPtr tgt, std::vector<int> hom = {}) {
    return ModuleMap(src, tgt, Mat64(tgt->rank(), std::vector<std::int64_t>(src->rank(), 0)), std::move(hom));
  }
  static ModuleMap identity(ModPtr m) {
    Mat64 id(m->rank(), std::vector<std::int64_t>(m->rank(), 0));
    for (int i = 0; i < m->rank(); ++i) id[i][i] = 1;
    return ModuleMap(m, m, id);
  }
  // From images of the source basis.
  static ModuleMap from_images(ModPtr src, ModPtr tgt, const std::vector<Elem>& images, std::vector<int> hom = {}) {
    Mat64 m(tgt->rank(), std::vector<std::int64_t>(src->rank(), 0));
    for (int j = 0; j < src->rank(); ++j)
      for (int i = 0; i < tgt->rank(); ++i) m[i][j] = images[j][i];
    return ModuleMap(src, tgt, m, std::move(hom));
  }

  const ModPtr& source() const { return src_; }
  const ModPtr& target() const { return tgt_; }
  const Mat64& matrix() const { return m_; }
  const std::vector<int>& hom() const { return hom_; }
  int map_group(int g) const { return hom_.empty() ? g : hom_[g]; }

  Elem operator()(const Elem& x) const { return FiniteGModule::apply_matrix(m_, x, tgt_->orders()); }

  // First failing generator of G, or -1.
  int equivariance_failure() const {
    for (int s : src_->group()->generators())
      for (int j = 0; j < src_->rank(); ++j) {
        Elem e = src_->basis(j);
        if (!tgt_->equal((*this)(src_->act(s, e)), tgt_->act(map_group(s), (*this)(e)))) return s;
      }
    return -1;
  }
  bool is_equivariant() const { return equivariance_failure() < 0; }

  bool is_zero() const {
    for (int j = 0; j < src_->rank(); ++j)
      if (!tgt_->is_zero((*this)(src_->basis(j)))) return false;
    return true;
  }
  friend bool operator==(const ModuleMap& a, const ModuleMap& b) {
    if (a.src_->rank() != b.src_->rank() || a.tgt_->orders() != b.tgt_->orders()) return false;
    for (int j = 0; j < a.src_->rank(); ++j)
      if (!a.tgt_->equal(a(a.src_->basis(j)), b(b.src_->basis(j)))) return false;
    return true;
  }

  // this o other
  ModuleMap after(const ModuleMap& other) const {
    std::vector<Elem> imgs;
    for (int j = 0; j < other.src_->rank(); ++j) imgs.push_back((*this)(other(other.src_->basis(j))));
    std::vector<int> h;
    if (!hom_.empty() || !other.hom_.empty()) {
      h.resize(other.src_->group()->size());
      for (int g = 0; g < other.src_->group()->size(); ++g) h[g] = map_group(other.map_group(g));
    }
    return from_images(other.src_, tgt_, imgs, h);
  }
  ModuleMap plus(const ModuleMap& o) const {
    std::vector<Elem> imgs;
    for (int j = 0; j < src_->rank(); ++j) imgs.push_back(tgt_->add((*this)(src_->basis(j)), o(src_->basis(j))));
    return from_images(src_, tgt_, imgs, hom_);
  }
  ModuleMap scaled(std::int64_t s) const {
    std::vector<Elem> imgs;
    for (int j = 0; j < src_->rank(); ++j) imgs.push_back(tgt_->scale((*this)(src_->basis(j)), s));
    return from_images(src_, tgt_, imgs, hom_);
  }
  // x -> r * f(x) with r acting on the target
  template <class R>
  ModuleMap then_act(const R& r) const {
    std::vector<Elem> imgs;
    for (int j = 0; j < src_->rank(); ++j) imgs.push_back(tgt_->act(r, (*this)(src_->basis(j))));
    return from_images(src_, tgt_, imgs, hom_);
  }

 private:
  ModPtr src_, tgt_;
  Mat64 m_;
  std::vector<int> hom_;
};

// ---- sub- and quotient modules ----

struct SubModule {
  ModPtr module;
  ModuleMap inclusion;
};

struct QuotientModule {
  ModPtr module;
  ModuleMap projection;
  std::vector<Elem> lifts;  // lifts[i] in the big module maps to basis i
};

namespace detail {

inline BMat stack_with_orders(const std::vector<Elem>& cols, const std::vector<std::int64_t>& orders) {
  const std::size_t n = orders.size(), r = cols.size();
  BMat a = zeros(n, r + n);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < n; ++i) a[i][j] = cols[j][i];
  for (std::size_t i = 0; i < n; ++i) a[i][r + i] = orders[i];
  return a;
}

}  // namespace detail

// Solves f(x) = y for x in the source of a map, through one Smith form of [M | diag(orders)].
class PreimageSolver {
 public:
  explicit PreimageSolver(const ModuleMap& f) : f_(f) {
    std::vector<Elem> cols;
    for (int j = 0; j < f.source()->rank(); ++j) cols.push_back(f(f.source()->basis(j)));
    a_ = detail::stack_with_orders(cols, f.target()->orders());
    snf_ = smith_normal_form(a_, f.target()->rank(), cols.size() + f.target()->rank());
  }
  std::optional<Elem> solve(const Elem& y) const {
    std::vector<BigInt> yy(y.begin(), y.end());
    const std::size_t cols = f_.source()->rank() + f_.target()->rank();
    auto z = solve_integer(snf_, cols, yy);
    if (!z) return std::nullopt;
    Elem x(f_.source()->rank());
    for (int j = 0; j < f_.source()->rank(); ++j) x[j] = mod_big((*z)[j], f_.source()->orders()[j]);
    return x;
  }
  // generators of ker f
  std::vector<Elem> kernel_generators() const {
    const std::size_t cols = f_.source()->rank() + f_.target()->rank();
    std::vector<Elem> out;
    for (auto& v : integer_kernel(snf_, cols)) {
      Elem x(f_.source()->rank());
      for (int j = 0; j < f_.source()->rank(); ++j) x[j] = mod_big(v[j], f_.source()->orders()[j]);
      if (!f_.source()->is_zero(x)) out.push_back(x);
    }
    return out;
  }

 private:
  ModuleMap f_;
  BMat a_;
  SmithForm snf_;
};

// The G-submodule generated (as a group) by gens; gens must span a G-stable subgroup.
inline SubModule submodule(const ModPtr& m, const std::vector<Elem>& gens) {
  const std::size_t r = gens.size();
  std::vector<Elem> basis;
  std::vector<std::int64_t> orders;
  if (r > 0) {
    BMat a = detail::stack_with_orders(gens, m->orders());
    auto s = smith_normal_form(a, m->rank(), r + m->rank());
    // relations among the gens
    BMat rel;
    for (auto& v : integer_kernel(s, r + m->rank())) rel.push_back(std::vector<BigInt>(v.begin(), v.begin() + r));
    BMat relt = zeros(r, rel.size());
    for (std::size_t j = 0; j < rel.size(); ++j)
      for (std::size_t i = 0; i < r; ++i) relt[i][j] = rel[j][i];
    auto t = smith_normal_form(relt, r, rel.size());
    for (std::size_t i = 0; i < r; ++i) {
      BigInt d = i < t.rank ? t.D[i][i] : BigInt(0);
      if (d == 0) throw ModuleError("submodule of a finite module must be finite");
      if (d == 1) continue;
      Elem g = m->zero();
      for (std::size_t j = 0; j < r; ++j) g = m->add(g, m->scale(gens[j], mod_big(t.Uinv[j][i], m->exponent())));
      basis.push_back(g);
      orders.push_back(to_i64(d));
    }
  }
  // action on the new basis
  auto bare = FiniteGModule::trivial_action(m->group(), orders);
  Mat64 incl_m(m->rank(), std::vector<std::int64_t>(basis.size(), 0));
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (int i = 0; i < m->rank(); ++i) incl_m[i][j] = basis[j][i];
  ModuleMap incl0(bare, m, incl_m);
  PreimageSolver solver(incl0);
  auto sub = FiniteGModule::from_generators(m->group(), orders, [&](int s) {
    Mat64 a(orders.size(), std::vector<std::int64_t>(orders.size(), 0));
    for (std::size_t j = 0; j < basis.size(); ++j) {
      auto x = solver.solve(m->act(s, basis[j]));
      if (!x) throw ModuleError("generated subgroup is not G-stable");
      for (std::size_t i = 0; i < orders.size(); ++i) a[i][j] = (*x)[i];
    }
    return a;
  });
  return SubModule{sub, ModuleMap(sub, m, incl_m)};
}

// m / <rels>. With a target group and a surjection res: G -> G0 whose kernel acts trivially
// on the quotient, the result is a G0-module (used for coinvariants).
inline QuotientModule quotient(const ModPtr& m, const std::vector<Elem>& rels, GroupPtr g0 = nullptr, const std::vector<int>& res = {}) {
  BMat a = zeros(m->rank(), m->rank() + rels.size());
  for (int i = 0; i < m->rank(); ++i) a[i][i] = m->orders()[i];
  for (std::size_t j = 0; j < rels.size(); ++j)
    for (int i = 0; i < m->rank(); ++i) a[i][m->rank() + j] = rels[j][i];
  auto s = smith_normal_form(a, m->rank(), m->rank() + rels.size());
  std::vector<int> keep;
  std::vector<std::int64_t> orders;
  for (int i = 0; i < m->rank(); ++i) {
    BigInt d = s.D[i][i];
    if (d != 1) keep.push_back(i), orders.push_back(to_i64(d));
  }
  std::vector<Elem> lifts;
  for (int i : keep) {
    Elem x(m->rank());
    for (int r = 0; r < m->rank(); ++r) x[r] = mod_big(s.Uinv[r][i], m->orders()[r]);
    lifts.push_back(x);
  }
  auto project = [&](const Elem& x) {
    Elem y(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      BigInt acc = 0;
      for (int r = 0; r < m->rank(); ++r) acc += s.U[keep[k]][r] * x[r];
      y[k] = mod_big(acc, orders[k]);
    }
    return y;
  };
  GroupPtr g = g0 ? g0 : m->group();
  std::vector<int> lift_of(g->size(), -1);
  for (int x = 0; x < m->group()->size(); ++x) {
    int y = res.empty() ? x : res[x];
    if (lift_of[y] < 0) lift_of[y] = x;
  }
  for (int y = 0; y < g->size(); ++y)
    if (lift_of[y] < 0) throw ModuleError("group map for the quotient is not surjective");
  auto q = FiniteGModule::from_generators(g, orders, [&](int s0) {
    Mat64 a0(orders.size(), std::vector<std::int64_t>(orders.size(), 0));
    for (std::size_t j = 0; j < lifts.size(); ++j) {
      Elem y = project(m->act(lift_of[s0], lifts[j]));
      for (std::size_t i = 0; i < orders.size(); ++i) a0[i][j] = y[i];
    }
    return a0;
  });
  std::vector<Elem> imgs;
  for (int j = 0; j < m->rank(); ++j) imgs.push_back(project(m->basis(j)));
  ModuleMap proj = ModuleMap::from_images(m, q, imgs, res);
  if (!proj.is_equivariant()) throw ModuleError("quotient relations are not G-stable");
  return QuotientModule{q, proj, lifts};
}

inline SubModule kernel(const ModuleMap& f) { return submodule(f.source(), PreimageSolver(f).kernel_generators()); }

inline SubModule image(const ModuleMap& f) {
  std::vector<Elem> gens;
  for (int j = 0; j < f.source()->rank(); ++j) gens.push_back(f(f.source()->basis(j)));
  return submodule(f.target(), gens);
}

inline QuotientModule cokernel(const ModuleMap& f) {
  std::vector<Elem> rels;
  for (int j = 0; j < f.source()->rank(); ++j) rels.push_back(f(f.source()->basis(j)));
  return quotient(f.target(), rels);
}

// x with l^j x = 0
inline SubModule torsion(const ModPtr& m, std::int64_t lj) {
  std::vector<Elem> gens;
  for (int i = 0; i < m->rank(); ++i) {
    std::int64_t o = m->orders()[i];
    std::int64_t g = gcd64(o, lj);
    Elem x = m->zero();
    x[i] = o / g;
    gens.push_back(m->normalize(x));
  }
  return submodule(m, gens);
}

// Direct sum of two modules over the same group.
inline ModPtr direct_sum(const ModPtr& a, const ModPtr& b) {
  std::vector<std::int64_t> orders = a->orders();
  orders.insert(orders.end(), b->orders().begin(), b->orders().end());
  const int na = a->rank(), nb = b->rank();
  return FiniteGModule::from_generators(a->group(), orders, [&](int s) {
    Mat64 m(na + nb, std::vector<std::int64_t>(na + nb, 0));
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < na; ++j) m[i][j] = a->matrix(s)[i][j];
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) m[na + i][na + j] = b->matrix(s)[i][j];
    return m;
  });
}

}  // namespace stickel
