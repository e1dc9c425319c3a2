// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ildl/block_diag.hpp"
#include "ildl/factorization.hpp"
#include "ildl/storage.hpp"

namespace ildl {

/// Positive definite form of an LDL^T factorization: Lhat = L * G with G
/// block diagonal, chosen so that Lhat * S * Lhat^T = L D L^T for a
/// signature S of +-1 entries (symmetric) or +-rotation blocks (skew).
/// M = Lhat * Lhat^T is then symmetric positive definite.
///
/// G is never written through L: scalar factors stay in a per-row array and
/// 2x2 mixers in a block list, applied on the fly during solves. A 2x2
/// mixer gives Lhat one entry above the diagonal (lower Hessenberg), which
/// solves handle pairwise without materializing the mixed rows.
class SpdFactor {
 public:
  struct MixBlock {
    int start = 0;
    std::array<double, 4> g{};     // row-major 2x2, right-applied to the row pair
    std::array<double, 4> ginv{};
    double sign = 1.0;             // skew pairs: sign of the block's (0,1) entry
  };

  SpdFactor() = default;

  int n() const { return lower_.n(); }
  SymmetryKind kind() const { return kind_; }
  const UnitLowerFactor& lower() const { return lower_; }
  double row_scale(int i) const { return row_scale_[i]; }
  double signature(int i) const { return signature_[i]; }
  const std::vector<MixBlock>& mix_blocks() const { return mix_; }

  /// x <- (Lhat Lhat^T)^{-1} x  =  L^{-T} G^{-T} G^{-1} L^{-1} x.
  void solve_in_place(std::vector<double>& x) const {
    lower_.forward_solve(x);
    for (int i = 0; i < n(); ++i) x[i] *= inv_scale_sq_[i];
    for (const MixBlock& b : mix_) {
      const double u = x[b.start], v = x[b.start + 1];
      const double y1 = b.ginv[0] * u + b.ginv[1] * v;
      const double y2 = b.ginv[2] * u + b.ginv[3] * v;
      x[b.start] = b.ginv[0] * y1 + b.ginv[2] * y2;
      x[b.start + 1] = b.ginv[1] * y1 + b.ginv[3] * y2;
    }
    lower_.backward_solve(x);
  }

  static SpdFactor from_symmetric(const UnitLowerFactor& l, const BlockDiag& d) {
    SpdFactor f;
    f.init(l, SymmetryKind::symmetric);
    for (const BlockDiag::Block& blk : d.blocks()) {
      if (blk.size == 1) {
        if (blk.a == 0.0) throw std::logic_error("SpdFactor: zero 1x1 block");
        f.row_scale_[blk.start] = std::sqrt(std::abs(blk.a));
        f.inv_scale_sq_[blk.start] = 1.0 / std::abs(blk.a);
        f.signature_[blk.start] = blk.a > 0.0 ? 1.0 : -1.0;
      } else {
        f.push_symmetric_mixer(blk);
      }
    }
    return f;
  }

  static SpdFactor from_skew(const UnitLowerFactor& l, const BlockDiag& d) {
    SpdFactor f;
    f.init(l, SymmetryKind::skew);
    for (const BlockDiag::Block& blk : d.blocks()) {
      if (blk.a == 0.0) throw std::logic_error("SpdFactor: zero skew block");
      const double s = std::sqrt(std::abs(blk.a));
      MixBlock m;
      m.start = blk.start;
      m.g = {s, 0.0, 0.0, s};
      m.ginv = {1.0 / s, 0.0, 0.0, 1.0 / s};
      m.sign = blk.a > 0.0 ? 1.0 : -1.0;
      f.row_scale_[blk.start] = s;
      f.row_scale_[blk.start + 1] = s;
      f.signature_[blk.start] = 0.0;
      f.signature_[blk.start + 1] = 0.0;
      f.mix_.push_back(m);
    }
    return f;
  }

 private:
  void init(const UnitLowerFactor& l, SymmetryKind kind) {
    lower_ = l;
    kind_ = kind;
    row_scale_.assign(lower_.n(), 1.0);
    inv_scale_sq_.assign(lower_.n(), 1.0);
    signature_.assign(lower_.n(), 1.0);
  }

  void push_symmetric_mixer(const BlockDiag::Block& blk) {
    const double a = blk.a, b = blk.b, c = blk.c;
    double l1, l2, c0, s0;
    if (b == 0.0) {
      l1 = a;
      l2 = c;
      c0 = 1.0;
      s0 = 0.0;
    } else {
      // Closed-form eigendecomposition [[a,b],[b,c]] = Q diag(l1,l2) Q^T
      // with the better-conditioned eigenvector branch.
      const double half = 0.5 * (a - c);
      const double r = std::hypot(half, b);
      l1 = 0.5 * (a + c) + r;
      l2 = 0.5 * (a + c) - r;
      double vx, vy;
      if (half >= 0.0) {
        vx = half + r;
        vy = b;
      } else {
        vx = b;
        vy = r - half;
      }
      const double nrm = std::hypot(vx, vy);
      c0 = vx / nrm;
      s0 = vy / nrm;
    }
    if (l1 == 0.0 || l2 == 0.0) throw std::logic_error("SpdFactor: singular 2x2 block");
    const double s1 = std::sqrt(std::abs(l1)), s2 = std::sqrt(std::abs(l2));
    MixBlock m;
    m.start = blk.start;
    m.g = {c0 * s1, -s0 * s2, s0 * s1, c0 * s2};
    m.ginv = {c0 / s1, s0 / s1, -s0 / s2, c0 / s2};
    f_signature(m.start, l1 > 0.0 ? 1.0 : -1.0);
    f_signature(m.start + 1, l2 > 0.0 ? 1.0 : -1.0);
    mix_.push_back(m);
  }

  void f_signature(int i, double v) { signature_[i] = v; }

  UnitLowerFactor lower_;
  SymmetryKind kind_ = SymmetryKind::symmetric;
  std::vector<double> row_scale_;
  std::vector<double> inv_scale_sq_;
  std::vector<double> signature_;
  std::vector<MixBlock> mix_;
};

inline SpdFactor spd_transform_symmetric(const UnitLowerFactor& l, const BlockDiag& d) {
  return SpdFactor::from_symmetric(l, d);
}

inline SpdFactor spd_transform_skew(const UnitLowerFactor& l, const BlockDiag& d) {
  return SpdFactor::from_skew(l, d);
}

/// Returns (Lhat Lhat^T)^{-1} r.
inline std::vector<double> apply_spd_preconditioner(const SpdFactor& f, const std::vector<double>& r) {
  std::vector<double> x = r;
  f.solve_in_place(x);
  return x;
}

}  // namespace ildl
