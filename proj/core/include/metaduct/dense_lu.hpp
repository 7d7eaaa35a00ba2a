#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>

namespace metaduct {

template <std::size_t N>
using CMatrix = std::array<std::array<std::complex<double>, N>, N>;

template <std::size_t N>
using CVector = std::array<std::complex<double>, N>;

// LU factorization with partial (row) pivoting for small dense complex
// systems. factor() returns false on an exactly zero pivot.
template <std::size_t N>
class DenseLu {
 public:
  bool factor(const CMatrix<N>& a) {
    lu_ = a;
    for (std::size_t i = 0; i < N; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < N; ++k) {
      std::size_t piv = k;
      double best = std::abs(lu_[k][k]);
      for (std::size_t i = k + 1; i < N; ++i) {
        const double v = std::abs(lu_[i][k]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best == 0.0) return false;
      if (piv != k) {
        std::swap(lu_[piv], lu_[k]);
        std::swap(perm_[piv], perm_[k]);
      }
      for (std::size_t i = k + 1; i < N; ++i) {
        lu_[i][k] /= lu_[k][k];
        const auto l = lu_[i][k];
        for (std::size_t j = k + 1; j < N; ++j) lu_[i][j] -= l * lu_[k][j];
      }
    }
    return true;
  }

  [[nodiscard]] CVector<N> solve(const CVector<N>& b) const {
    CVector<N> x;
    for (std::size_t i = 0; i < N; ++i) {
      auto s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_[i][j] * x[j];
      x[i] = s;
    }
    for (std::size_t i = N; i-- > 0;) {
      auto s = x[i];
      for (std::size_t j = i + 1; j < N; ++j) s -= lu_[i][j] * x[j];
      x[i] = s / lu_[i][i];
    }
    return x;
  }

  [[nodiscard]] CMatrix<N> inverse() const {
    CMatrix<N> inv{};
    for (std::size_t c = 0; c < N; ++c) {
      CVector<N> e{};
      e[c] = 1.0;
      const auto col = solve(e);
      for (std::size_t r = 0; r < N; ++r) inv[r][c] = col[r];
    }
    return inv;
  }

 private:
  CMatrix<N> lu_{};
  std::array<std::size_t, N> perm_{};
};

template <std::size_t N>
double norm1(const CMatrix<N>& a) {
  double best = 0.0;
  for (std::size_t c = 0; c < N; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < N; ++r) s += std::abs(a[r][c]);
    if (s > best) best = s;
  }
  return best;
}

template <std::size_t N>
CVector<N> multiply(const CMatrix<N>& a, const CVector<N>& x) {
  CVector<N> y{};
  for (std::size_t r = 0; r < N; ++r) {
    for (std::size_t c = 0; c < N; ++c) y[r] += a[r][c] * x[c];
  }
  return y;
}

template <std::size_t N>
double norm2(const CVector<N>& x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace metaduct
