// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ildl/storage.hpp"

namespace ildl {

/// Uniform interior grid on the unit square/cube with Dirichlet boundaries
/// eliminated: m points per dimension, mesh width h = 1/(m+1).
struct GridSpec {
  int m = 2;
  int dims = 2;

  double h() const { return 1.0 / (m + 1); }
  long n() const {
    long v = 1;
    for (int d = 0; d < dims; ++d) v *= m;
    return v;
  }
};

/// 5-point Helmholtz stencil on the 2D grid, assembled without the global
/// 1/h^2 factor: diagonal 4 - c where the continuous shift is alpha = c/h^2,
/// off-diagonal -1 couplings. Lexicographic x-fastest numbering.
inline SparseSymStore helmholtz_matrix(const GridSpec& spec, double alpha_over_h2) {
  if (spec.dims != 2) throw std::invalid_argument("helmholtz_matrix: dims must be 2");
  if (spec.m < 2) throw std::invalid_argument("helmholtz_matrix: m must be at least 2");
  const int m = spec.m;
  const int n = m * m;
  std::vector<Triplet> t;
  t.reserve(3 * static_cast<std::size_t>(n));
  auto id = [m](int x, int y) { return x + m * y; };
  const double diag = 4.0 - alpha_over_h2;
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) {
      const int p = id(x, y);
      if (diag != 0.0) t.push_back({p, p, diag});
      if (x + 1 < m) t.push_back({id(x + 1, y), p, -1.0});
      if (y + 1 < m) t.push_back({id(x, y + 1), p, -1.0});
    }
  return SparseSymStore::build(n, SymmetryKind::symmetric, t);
}

/// Skew part of the centered-difference convection-diffusion operator on
/// the 3D grid: the diffusion cancels, leaving couplings of magnitude
/// beta/gamma/delta (the mesh Peclet numbers) along the three axes, zero
/// diagonal. The stored lower entry of each +axis neighbor pair is the
/// negative coefficient.
inline SparseSymStore convdiff_skew_matrix(const GridSpec& spec, double beta, double gamma,
                                           double delta) {
  if (spec.dims != 3) throw std::invalid_argument("convdiff_skew_matrix: dims must be 3");
  if (spec.m < 2) throw std::invalid_argument("convdiff_skew_matrix: m must be at least 2");
  const int m = spec.m;
  const long n = static_cast<long>(m) * m * m;
  std::vector<Triplet> t;
  auto id = [m](int x, int y, int z) { return x + m * (y + m * z); };
  for (int z = 0; z < m; ++z)
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < m; ++x) {
        const int p = id(x, y, z);
        if (x + 1 < m && beta != 0.0) t.push_back({id(x + 1, y, z), p, -beta});
        if (y + 1 < m && gamma != 0.0) t.push_back({id(x, y + 1, z), p, -gamma});
        if (z + 1 < m && delta != 0.0) t.push_back({id(x, y, z + 1), p, -delta});
      }
  return SparseSymStore::build(static_cast<int>(n), SymmetryKind::skew, t);
}

/// Analytic spectrum of the skew model operator: the m^3 imaginary parts
/// 2(beta cos(j pi h) + gamma cos(k pi h) + delta cos(l pi h)), indices
/// running over the interior modes 1..m with h = 1/(m+1).
inline std::vector<double> skew_spectrum(const GridSpec& spec, double beta, double gamma,
                                         double delta) {
  const int m = spec.m;
  const double h = spec.h();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m) * m * m);
  for (int j = 1; j <= m; ++j)
    for (int k = 1; k <= m; ++k)
      for (int l = 1; l <= m; ++l)
        out.push_back(2.0 * (beta * std::cos(j * M_PI * h) + gamma * std::cos(k * M_PI * h) +
                             delta * std::cos(l * M_PI * h)));
  return out;
}

/// Dense random symmetric matrix (G + G^T)/2 with standard normal entries.
inline SparseSymStore random_symmetric(int n, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  for (double& v : g) v = dist(rng);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i)
      t.push_back({i, j, 0.5 * (g[static_cast<std::size_t>(i) * n + j] +
                                g[static_cast<std::size_t>(j) * n + i])});
  return SparseSymStore::build(n, SymmetryKind::symmetric, t);
}

/// Dense random skew-symmetric matrix (G - G^T)/2.
inline SparseSymStore random_skew(int n, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> g(static_cast<std::size_t>(n) * n);
  for (double& v : g) v = dist(rng);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i)
      t.push_back({i, j, 0.5 * (g[static_cast<std::size_t>(i) * n + j] -
                                g[static_cast<std::size_t>(j) * n + i])});
  return SparseSymStore::build(n, SymmetryKind::skew, t);
}

}  // namespace ildl
