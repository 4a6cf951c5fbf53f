#pragma once

#include "stickel/exact_arith.hpp"

#include <optional>
#include <vector>

namespace stickel {

using BMat = std::vector<std::vector<BigInt>>;
using Mat64 = std::vector<std::vector<std::int64_t>>;
using Elem = std::vector<std::int64_t>;

inline BMat zeros(std::size_t r, std::size_t c) { return BMat(r, std::vector<BigInt>(c, 0)); }

inline BMat identity_matrix(std::size_t n) {
  BMat m = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline BMat to_big(const Mat64& m) {
  BMat out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (auto v : m[i]) out[i].push_back(BigInt(v));
  return out;
}

// U * A * V = D with U, V unimodular and D diagonal, d_0 | d_1 | ... ; Uinv kept alongside U.
struct SmithForm {
  BMat U, Uinv, V, D;
  std::size_t rank = 0;
};

inline SmithForm smith_normal_form(const BMat& a, std::size_t rows, std::size_t cols) {
  SmithForm s;
  s.D = a;
  s.U = identity_matrix(rows);
  s.Uinv = identity_matrix(rows);
  s.V = identity_matrix(cols);
  auto& d = s.D;
  auto row_add = [&](std::size_t i, std::size_t j, const BigInt& q) {  // row_i += q row_j
    if (q == 0) return;
    for (std::size_t c = 0; c < cols; ++c) d[i][c] += q * d[j][c];
    for (std::size_t c = 0; c < rows; ++c) s.U[i][c] += q * s.U[j][c];
    for (std::size_t r = 0; r < rows; ++r) s.Uinv[r][j] -= q * s.Uinv[r][i];
  };
  auto row_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    std::swap(d[i], d[j]);
    std::swap(s.U[i], s.U[j]);
    for (std::size_t r = 0; r < rows; ++r) std::swap(s.Uinv[r][i], s.Uinv[r][j]);
  };
  auto row_neg = [&](std::size_t i) {
    for (auto& x : d[i]) x = -x;
    for (auto& x : s.U[i]) x = -x;
    for (std::size_t r = 0; r < rows; ++r) s.Uinv[r][i] = -s.Uinv[r][i];
  };
  auto col_add = [&](std::size_t i, std::size_t j, const BigInt& q) {  // col_i += q col_j
    if (q == 0) return;
    for (std::size_t r = 0; r < rows; ++r) d[r][i] += q * d[r][j];
    for (std::size_t r = 0; r < cols; ++r) s.V[r][i] += q * s.V[r][j];
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < rows; ++r) std::swap(d[r][i], d[r][j]);
    for (std::size_t r = 0; r < cols; ++r) std::swap(s.V[r][i], s.V[r][j]);
  };

  std::size_t t = 0;
  for (; t < std::min(rows, cols); ++t) {
    while (true) {
      // smallest nonzero entry in the trailing block
      std::size_t pr = rows, pc = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (d[i][j] != 0 && (pr == rows || abs(d[i][j]) < abs(d[pr][pc]))) pr = i, pc = j;
      if (pr == rows) goto done;
      row_swap(t, pr);
      col_swap(t, pc);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (d[i][t] == 0) continue;
        BigInt q = d[i][t] / d[t][t];
        row_add(i, t, -q);
        if (d[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (d[t][j] == 0) continue;
        BigInt q = d[t][j] / d[t][t];
        col_add(j, t, -q);
        if (d[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility of the rest by the pivot
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (d[i][j] % d[t][t] != 0) {
            row_add(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (d[t][t] < 0) row_neg(t);
  }
done:
  s.rank = t;
  return s;
}

inline SmithForm smith_normal_form(const BMat& a) {
  std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  return smith_normal_form(a, rows, cols);
}

// Integer solutions of A z = y: one particular solution, or nothing.
inline std::optional<std::vector<BigInt>> solve_integer(const SmithForm& s, std::size_t cols, const std::vector<BigInt>& y) {
  std::size_t rows = s.U.size();
  std::vector<BigInt> uy(rows, 0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < rows; ++j) uy[i] += s.U[i][j] * y[j];
  std::vector<BigInt> z(cols, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    if (i < s.rank) {
      if (uy[i] % s.D[i][i] != 0) return std::nullopt;
      z[i] = uy[i] / s.D[i][i];
    } else if (uy[i] != 0) {
      return std::nullopt;
    }
  }
  std::vector<BigInt> out(cols, 0);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i] += s.V[i][j] * z[j];
  return out;
}

// Basis of the integer kernel {z : A z = 0}, as columns of V past the rank.
inline std::vector<std::vector<BigInt>> integer_kernel(const SmithForm& s, std::size_t cols) {
  std::vector<std::vector<BigInt>> out;
  for (std::size_t j = s.rank; j < cols; ++j) {
    std::vector<BigInt> v(cols);
    for (std::size_t i = 0; i < cols; ++i) v[i] = s.V[i][j];
    out.push_back(std::move(v));
  }
  return out;
}

inline std::int64_t to_i64(const BigInt& x) { return static_cast<std::int64_t>(x); }

inline std::int64_t mod_big(const BigInt& x, std::int64_t n) {
  BigInt r = x % n;
  if (r < 0) r += n;
  return to_i64(r);
}

}  // namespace stickel
