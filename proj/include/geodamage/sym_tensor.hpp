#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace geodamage {

/// Symmetric n x n tensor in orthonormal Voigt storage.
///
/// Off-diagonal entries are stored multiplied by sqrt(2), so the Euclidean
/// dot product of the storage arrays equals the Frobenius product A:B.
/// Ordering: 2D (xx, yy, xy); 3D (xx, yy, zz, yz, xz, xy).
template <int Dim>
struct SymTensor {
  static_assert(Dim == 2 || Dim == 3, "SymTensor supports n = 2 and n = 3");

  static constexpr int kDim = Dim;
  static constexpr int kSize = Dim * (Dim + 1) / 2;

  std::array<double, kSize> voigt{};

  static constexpr SymTensor zero() { return {}; }

  static constexpr SymTensor identity() {
    SymTensor t;
    for (int i = 0; i < Dim; ++i) t.voigt[i] = 1.0;
    return t;
  }

  static SymTensor diag(std::array<double, Dim> d) {
    SymTensor t;
    for (int i = 0; i < Dim; ++i) t.voigt[i] = d[i];
    return t;
  }

  /// Builds from a full matrix; only the symmetric part is kept.
  static SymTensor from_matrix(const std::array<std::array<double, Dim>, Dim>& m) {
    SymTensor t;
    for (int i = 0; i < Dim; ++i) t.voigt[i] = m[i][i];
    for (int k = Dim; k < kSize; ++k) {
      auto [i, j] = off_diagonal_index(k);
      t.voigt[k] = std::numbers::sqrt2 * 0.5 * (m[i][j] + m[j][i]);
    }
    return t;
  }

  std::array<std::array<double, Dim>, Dim> to_matrix() const {
    std::array<std::array<double, Dim>, Dim> m{};
    for (int i = 0; i < Dim; ++i) m[i][i] = voigt[i];
    for (int k = Dim; k < kSize; ++k) {
      auto [i, j] = off_diagonal_index(k);
      m[i][j] = m[j][i] = voigt[k] / std::numbers::sqrt2;
    }
    return m;
  }

  /// Matrix entry (i, j).
  double operator()(int i, int j) const {
    if (i == j) return voigt[i];
    for (int k = Dim; k < kSize; ++k) {
      auto [a, b] = off_diagonal_index(k);
      if ((a == i && b == j) || (a == j && b == i)) return voigt[k] / std::numbers::sqrt2;
    }
    return 0.0;
  }

  double& operator[](int k) { return voigt[k]; }
  double operator[](int k) const { return voigt[k]; }

  double trace() const {
    double s = 0.0;
    for (int i = 0; i < Dim; ++i) s += voigt[i];
    return s;
  }

  /// Mean stress tr/n.
  double mean() const { return trace() / Dim; }

  SymTensor dev() const {
    SymTensor t = *this;
    const double m = mean();
    for (int i = 0; i < Dim; ++i) t.voigt[i] -= m;
    return t;
  }

  double norm() const { return std::sqrt(dot(*this, *this)); }

  friend double dot(const SymTensor& a, const SymTensor& b) {
    double s = 0.0;
    for (int k = 0; k < kSize; ++k) s += a.voigt[k] * b.voigt[k];
    return s;
  }

  SymTensor& operator+=(const SymTensor& o) {
    for (int k = 0; k < kSize; ++k) voigt[k] += o.voigt[k];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    for (int k = 0; k < kSize; ++k) voigt[k] -= o.voigt[k];
    return *this;
  }
  SymTensor& operator*=(double s) {
    for (auto& v : voigt) v *= s;
    return *this;
  }

  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator-(SymTensor a) { return a *= -1.0; }
  friend SymTensor operator*(double s, SymTensor a) { return a *= s; }
  friend SymTensor operator*(SymTensor a, double s) { return a *= s; }
  friend SymTensor operator/(SymTensor a, double s) { return a *= 1.0 / s; }

  friend bool operator==(const SymTensor&, const SymTensor&) = default;

 private:
  static constexpr std::array<int, 2> off_diagonal_index(int k) {
    if constexpr (Dim == 2) {
      return {0, 1};
    } else {
      constexpr std::array<std::array<int, 2>, 3> idx{{{1, 2}, {0, 2}, {0, 1}}};
      return idx[k - 3];
    }
  }
};

/// Full double contraction computed from matrix entries; used as an
/// independent check of the Voigt scaling.
template <int Dim>
double frobenius_from_matrices(const SymTensor<Dim>& a, const SymTensor<Dim>& b) {
  const auto ma = a.to_matrix();
  const auto mb = b.to_matrix();
  double s = 0.0;
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j) s += ma[i][j] * mb[i][j];
  return s;
}

using SymTensor2 = SymTensor<2>;

}  // namespace geodamage
