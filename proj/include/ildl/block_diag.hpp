// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ildl/storage.hpp"

namespace ildl {

/// Block diagonal D of an LDL^T factorization: an ordered run of 1x1 and
/// 2x2 blocks. Symmetric 2x2 blocks are [[a,b],[b,c]]; skew blocks are
/// [[0,a],[-a,0]] and are the only block kind a skew factorization may hold.
class BlockDiag {
 public:
  struct Block {
    int start = 0;
    int size = 1;
    double a = 0.0;  // 1x1 value, 2x2 (0,0) entry, or the skew (0,1) entry
    double b = 0.0;  // symmetric 2x2 off-diagonal
    double c = 0.0;  // symmetric 2x2 (1,1) entry
  };

  BlockDiag() = default;
  explicit BlockDiag(SymmetryKind kind) : kind_(kind) {}

  SymmetryKind kind() const { return kind_; }
  int n() const { return n_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int block_of(int index) const { return block_of_[index]; }
  const Block& block_at(int index) const { return blocks_[block_of_[index]]; }

  void push_1x1(double d) {
    if (kind_ == SymmetryKind::skew)
      throw std::invalid_argument("BlockDiag: skew factorizations use 2x2 blocks only");
    blocks_.push_back({n_, 1, d, 0.0, 0.0});
    block_of_.push_back(static_cast<int>(blocks_.size()) - 1);
    n_ += 1;
  }

  void push_2x2(double a, double b, double c) {
    blocks_.push_back({n_, 2, a, b, c});
    block_of_.push_back(static_cast<int>(blocks_.size()) - 1);
    block_of_.push_back(static_cast<int>(blocks_.size()) - 1);
    n_ += 2;
  }

  void push_2x2_skew(double a) {
    blocks_.push_back({n_, 2, a, 0.0, 0.0});
    block_of_.push_back(static_cast<int>(blocks_.size()) - 1);
    block_of_.push_back(static_cast<int>(blocks_.size()) - 1);
    n_ += 2;
  }

  /// In-place x <- D^{-1} x, blockwise closed form. The skew inverse is the
  /// swap-and-scale identity: [[0,a],[-a,0]]^{-1} = [[0,-1/a],[1/a,0]].
  void solve_in_place(std::vector<double>& x) const {
    for (const Block& blk : blocks_) {
      if (blk.size == 1) {
        x[blk.start] /= blk.a;
      } else if (kind_ == SymmetryKind::skew) {
        const double r1 = x[blk.start], r2 = x[blk.start + 1];
        x[blk.start] = -r2 / blk.a;
        x[blk.start + 1] = r1 / blk.a;
      } else {
        const double det = blk.a * blk.c - blk.b * blk.b;
        const double r1 = x[blk.start], r2 = x[blk.start + 1];
        x[blk.start] = (blk.c * r1 - blk.b * r2) / det;
        x[blk.start + 1] = (blk.a * r2 - blk.b * r1) / det;
      }
    }
  }

  /// x <- D x.
  void apply_in_place(std::vector<double>& x) const {
    for (const Block& blk : blocks_) {
      if (blk.size == 1) {
        x[blk.start] *= blk.a;
      } else if (kind_ == SymmetryKind::skew) {
        const double r1 = x[blk.start], r2 = x[blk.start + 1];
        x[blk.start] = blk.a * r2;
        x[blk.start + 1] = -blk.a * r1;
      } else {
        const double r1 = x[blk.start], r2 = x[blk.start + 1];
        x[blk.start] = blk.a * r1 + blk.b * r2;
        x[blk.start + 1] = blk.b * r1 + blk.c * r2;
      }
    }
  }

  /// Structural nonzero count: 1 per 1x1 block; a 2x2 block contributes its
  /// two off-diagonals plus its nonzero diagonal entries.
  std::size_t structural_nnz() const {
    std::size_t total = 0;
    for (const Block& blk : blocks_) {
      if (blk.size == 1) {
        total += 1;
      } else if (kind_ == SymmetryKind::skew) {
        total += 2;
      } else {
        total += 2 + (blk.a != 0.0 ? 1 : 0) + (blk.c != 0.0 ? 1 : 0);
      }
    }
    return total;
  }

 private:
  SymmetryKind kind_ = SymmetryKind::symmetric;
  int n_ = 0;
  std::vector<Block> blocks_;
  std::vector<int> block_of_;
};

}  // namespace ildl
