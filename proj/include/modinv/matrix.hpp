#pragma once

// Dense matrices over a coefficient ring and exact linear algebra over fields.

#include <cstddef>
#include <vector>

#include "modinv/error.hpp"

namespace modinv {

template <class C>
using Mat = std::vector<std::vector<C>>;

template <class R>
auto identity_matrix(const R& ring, std::size_t n) {
  using C = decltype(ring.one());
  Mat<C> m(n, std::vector<C>(n, ring.zero()));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = ring.one();
  return m;
}

template <class C>
Mat<C> operator*(const Mat<C>& a, const Mat<C>& b) {
  if (a.empty() || b.empty() || a[0].size() != b.size()) fail(Errc::InvalidInput, "matrix shape mismatch");
  const std::size_t n = a.size(), k = b.size(), m = b[0].size();
  Mat<C> c(n, std::vector<C>(m, b[0][0].ring().zero()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

template <class C>
Mat<C> operator-(const Mat<C>& a, const Mat<C>& b) {
  Mat<C> c = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) c[i][j] -= b[i][j];
  return c;
}

template <class C>
bool is_zero_matrix(const Mat<C>& a) {
  for (auto& row : a)
    for (auto& v : row)
      if (!v.is_zero()) return false;
  return true;
}

template <class C>
Mat<C> matrix_power(const Mat<C>& a, std::uint64_t e) {
  Mat<C> r = identity_matrix(a[0][0].ring(), a.size());
  Mat<C> b = a;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

/// Reduced row echelon form in place; returns pivot columns.
template <class C>
std::vector<std::size_t> rref(Mat<C>& a) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = rows;
    for (std::size_t i = r; i < rows; ++i)
      if (!a[i][c].is_zero()) {
        piv = i;
        break;
      }
    if (piv == rows) continue;
    std::swap(a[r], a[piv]);
    auto inv = a[r][c].inverse();
    for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c].is_zero()) continue;
      auto f = a[i][c];
      for (std::size_t j = c; j < cols; ++j)
        if (!a[r][j].is_zero()) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class C>
std::size_t rank(Mat<C> a) {
  return rref(a).size();
}

/// Basis of the right kernel {v : a v = 0}; `cols` is needed when a has no rows.
template <class C, class R>
std::vector<std::vector<C>> kernel(Mat<C> a, std::size_t cols, const R& ring) {
  std::vector<std::vector<C>> basis;
  if (a.empty()) {
    for (std::size_t j = 0; j < cols; ++j) {
      std::vector<C> v(cols, ring.zero());
      v[j] = ring.one();
      basis.push_back(v);
    }
    return basis;
  }
  auto piv = rref(a);
  std::vector<char> is_piv(cols, 0);
  for (auto c : piv) is_piv[c] = 1;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_piv[f]) continue;
    std::vector<C> v(cols, ring.zero());
    v[f] = ring.one();
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -a[i][f];
    basis.push_back(v);
  }
  return basis;
}

}  // namespace modinv
