// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ildl/block_diag.hpp"
#include "ildl/storage.hpp"

namespace ildl {

enum class PivotKind { rook, bunch_kaufman, none };
enum class DropNorm { two_norm, max_norm };

struct FactorParams {
  double drop_tol = 1e-4;                                      // relative threshold, in [0,1)
  double fill_factor = 2.0;                                    // per-column cap multiplier; inf = unbounded
  PivotKind pivot_kind = PivotKind::rook;
  double static_pivot_shift = 0.0;                             // 0 = sqrt(eps)*max|A|
  DropNorm drop_norm = DropNorm::two_norm;
  bool debug_audit = false;                                    // run segment audits each step
  bool record_pivot_audit = false;                             // collect acceptance inequalities
};

struct PivotAuditEntry {
  int step = 0;
  int size = 1;
  int branch = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

struct FactorDiagnostics {
  int static_pivots = 0;
  long pivots_1x1 = 0;
  long pivots_2x2 = 0;
  std::vector<PivotAuditEntry> pivot_audit;
  int audit_violations = 0;
};

struct PivotDecision {
  int size = 1;
  bool static_pivot = false;
  int branch = 0;                           // Bunch-Kaufman branch 1..4; rook: 0 = diagonal test, 1 = 1x1 at r, 2 = 2x2
  double audit_lhs = 0.0;                   // accepting inequality, evaluated at decision time
  double audit_rhs = 0.0;
  std::vector<std::pair<int, int>> swaps;   // symmetric exchanges, applied in order
};

/// Unit lower triangular factor; the diagonal is implicit, stored entries
/// are strictly below it.
class UnitLowerFactor {
 public:
  UnitLowerFactor() = default;
  explicit UnitLowerFactor(int n) : store_(n, SymmetryKind::symmetric) {}

  int n() const { return store_.n(); }
  std::size_t nnz() const { return store_.nnz_stored(); }
  SparseSymStore& store() { return store_; }
  const SparseSymStore& store() const { return store_; }

  /// x <- L^{-1} x by columns.
  void forward_solve(std::vector<double>& x) const {
    for (int j = 0; j < n(); ++j) {
      const double v = x[j];
      if (v == 0.0) continue;
      const auto& rows = store_.col_rows(j);
      const auto& vals = store_.col_values(j);
      for (std::size_t p = 0; p < rows.size(); ++p) x[rows[p]] -= vals[p] * v;
    }
  }

  /// x <- L^{-T} x by columns.
  void backward_solve(std::vector<double>& x) const {
    for (int j = n() - 1; j >= 0; --j) {
      const auto& rows = store_.col_rows(j);
      const auto& vals = store_.col_values(j);
      double s = 0.0;
      for (std::size_t p = 0; p < rows.size(); ++p) s += vals[p] * x[rows[p]];
      x[j] -= s;
    }
  }

 private:
  SparseSymStore store_;
};

struct FactorResult {
  UnitLowerFactor lower;
  BlockDiag diag_blocks;
  Permutation perm;
  FactorDiagnostics diagnostics;
};

/// Per-column cap on off-diagonal entries of L.
inline std::size_t column_cap(double fill_factor, std::size_t nnz_full, int n) {
  if (!std::isfinite(fill_factor)) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(
      std::ceil(fill_factor * static_cast<double>(nnz_full) / std::max(1, n)));
}

/// Threshold-then-cap dropping on one multiplier column. Entries strictly
/// below drop_tol * col_norm go first; of the survivors only the cap
/// largest magnitudes are kept, ties resolved toward lower row indices.
inline void apply_drop_rules(std::vector<std::pair<int, double>>& column, const FactorParams& params,
                             double col_norm, std::size_t cap) {
  const double threshold = params.drop_tol * col_norm;
  column.erase(std::remove_if(column.begin(), column.end(),
                              [&](const auto& e) { return std::abs(e.second) < threshold; }),
               column.end());
  if (column.size() > cap) {
    std::sort(column.begin(), column.end(), [](const auto& x, const auto& y) {
      const double ax = std::abs(x.second), ay = std::abs(y.second);
      return ax != ay ? ax > ay : x.first < y.first;
    });
    column.resize(cap);
  }
}

namespace detail {

/// Dense scatter buffer holding one fully updated column of the active
/// submatrix. `touched` is a superset pattern; entries outside it are zero.
struct WorkColumn {
  std::vector<double> val;
  std::vector<int> touched;
  std::vector<char> mark;
  int label = -1;

  void init(int n) {
    val.assign(n, 0.0);
    mark.assign(n, 0);
    touched.clear();
  }

  void clear() {
    for (int i : touched) {
      val[i] = 0.0;
      mark[i] = 0;
    }
    touched.clear();
    label = -1;
  }

  void add(int i, double v) {
    if (!mark[i]) {
      mark[i] = 1;
      touched.push_back(i);
    }
    val[i] += v;
  }

  void ensure(int i) {
    if (!mark[i]) {
      mark[i] = 1;
      touched.push_back(i);
    }
  }

  void swap_entries(int p, int q) {
    if (p == q) return;
    ensure(p);
    ensure(q);
    std::swap(val[p], val[q]);
  }
};

}  // namespace detail

/// Crout-ordered incomplete LDL^T engine shared by the symmetric and skew
/// paths. Works on a consumed copy of the (already preprocessed) matrix:
/// trailing columns of the copy stay untouched until their step, eliminated
/// columns are released, and the bi-index offsets give O(1) access to the
/// active tails of L's columns and to the mirrored row patterns used when a
/// pivot candidate column right of the current one must be updated.
class CroutFactorizer {
 public:
  CroutFactorizer(SparseSymStore working, FactorParams params)
      : w_(std::move(working)),
        params_(params),
        n_(w_.n()),
        kind_(w_.kind()),
        lower_(n_),
        diag_(kind_),
        perm_(n_) {
    if (params_.drop_tol < 0.0 || params_.drop_tol >= 1.0)
      throw std::invalid_argument("FactorParams: drop_tol must lie in [0,1)");
    if (!(params_.fill_factor > 0.0))
      throw std::invalid_argument("FactorParams: fill_factor must be positive");
    if (kind_ == SymmetryKind::skew && n_ % 2 != 0)
      throw std::invalid_argument("skew factorization requires an even dimension");
    cap_ = column_cap(params_.fill_factor, w_.nnz_full(), n_);
    shift_ = params_.static_pivot_shift > 0.0
                 ? params_.static_pivot_shift
                 : std::sqrt(std::numeric_limits<double>::epsilon()) * w_.max_abs();
    if (shift_ == 0.0) shift_ = std::sqrt(std::numeric_limits<double>::epsilon());
    for (auto& s : slots_) s.init(n_);
    row_stamp_.assign(n_, -1);
  }

  int step() const { return k_; }

  FactorResult run() {
    while (k_ < n_) {
      PivotDecision d = decide_pivot();
      eliminate(d);
    }
    FactorResult r;
    r.lower = std::move(lower_);
    r.diag_blocks = std::move(diag_);
    r.perm = std::move(perm_);
    r.diagnostics = std::move(diagnostics_);
    return r;
  }

  /// Updates the working column for active column c: scatters A's column
  /// (direct entries plus the mirrored row tail) and subtracts the delayed
  /// block contributions L_{k:n,b} * D_b * L_{c,b}^T for every earlier block
  /// b that row c of L touches.
  const detail::WorkColumn& update_column(int c) { return slots_[compute_into_free_slot(c)]; }

  PivotDecision decide_pivot() {
    switch (params_.pivot_kind) {
      case PivotKind::rook:
        return kind_ == SymmetryKind::skew ? decide_skew_rook() : decide_rook();
      case PivotKind::bunch_kaufman:
        return kind_ == SymmetryKind::skew ? decide_skew_bunch() : decide_bk();
      case PivotKind::none:
        return decide_none();
    }
    throw std::logic_error("unreachable");
  }

  /// Applies the decision's exchanges, extracts the pivot block, divides the
  /// remaining rows, applies the dropping rules and advances the bi-index.
  void eliminate(const PivotDecision& d) {
    for (auto [x, y] : d.swaps) apply_swap(x, y);

    const int k = k_;
    const int s0 = compute_into_free_slot(k);
    evictable_ = 1 - s0;
    detail::WorkColumn& c0 = slots_[s0];
    if (d.size == 1) {
      double piv = c0.val[k];
      if (d.static_pivot || piv == 0.0) {
        piv = shift_;
        ++diagnostics_.static_pivots;
      }
      record_audit_1x1(d, c0, piv);
      diag_.push_1x1(piv);
      ++diagnostics_.pivots_1x1;

      std::vector<std::pair<int, double>> col;
      col.reserve(c0.touched.size());
      for (int i : c0.touched)
        if (i > k && c0.val[i] != 0.0) col.push_back({i, c0.val[i] / piv});
      finalize_column(k, col);

      advance(k);
      k_ += 1;
    } else {
      detail::WorkColumn& c1 = slots_[compute_into_free_slot(k + 1)];
      double a = c0.val[k], b = c0.val[k + 1], c = c1.val[k + 1];
      double skew_d = -b;  // value of the (k, k+1) entry
      if (d.static_pivot) {
        if (kind_ == SymmetryKind::skew) {
          skew_d = shift_;
          b = -shift_;
        }
        ++diagnostics_.static_pivots;
      }
      record_audit_2x2(d, c0, c1);
      if (kind_ == SymmetryKind::skew) {
        diag_.push_2x2_skew(skew_d);
      } else {
        diag_.push_2x2(a, b, c);
      }
      ++diagnostics_.pivots_2x2;

      std::vector<std::pair<int, double>> col0, col1;
      auto push_multiplier = [&](int i, double m0, double m1) {
        if (m0 != 0.0) col0.push_back({i, m0});
        if (m1 != 0.0) col1.push_back({i, m1});
      };
      if (kind_ == SymmetryKind::skew) {
        // Row times the closed-form inverse of [[0,d],[-d,0]]: a column swap
        // with one sign flip and a scale.
        for_each_pair_row(c0, c1, k, [&](int i, double x, double y) {
          push_multiplier(i, y / skew_d, -x / skew_d);
        });
      } else {
        const double det = a * c - b * b;
        for_each_pair_row(c0, c1, k, [&](int i, double x, double y) {
          push_multiplier(i, (x * c - y * b) / det, (y * a - x * b) / det);
        });
      }
      finalize_column(k, col0);
      finalize_column(k + 1, col1);

      advance(k);
      advance(k + 1);
      k_ += 2;
    }

    for (auto& s : slots_) s.clear();
    if (params_.debug_audit) {
      w_.audit_bi_index(k_);
      lower_.store().audit_bi_index(k_);
    }
  }

 private:
  int slot_index(int label) const {
    for (int s = 0; s < 2; ++s)
      if (slots_[s].label == label) return s;
    return -1;
  }

  int compute_into_free_slot(int c) {
    int s = slot_index(c);
    if (s < 0) {
      s = slots_[0].label < 0 ? 0 : (slots_[1].label < 0 ? 1 : evictable_);
      compute_working(slots_[s], c);
    }
    return s;
  }

  void compute_working(detail::WorkColumn& buf, int c) {
    buf.clear();
    buf.label = c;

    const auto& rows = w_.col_rows(c);
    const auto& vals = w_.col_values(c);
    for (std::size_t p = 0; p < rows.size(); ++p) buf.add(rows[p], vals[p]);

    // Mirrored tail of row c: stored (c, j) with k_ <= j < c.
    const auto& rcols = w_.row_cols(c);
    for (std::size_t p = w_.row_first(c); p < rcols.size(); ++p) {
      const int j = rcols[p];
      if (j == c) continue;
      const int pos = w_.find_in_col(j, c, w_.col_first(j));
      if (pos < 0) continue;
      const double v = w_.col_values(j)[pos];
      buf.add(j, kind_ == SymmetryKind::skew ? -v : v);
    }

    // Delayed updates from every earlier block that row c of L touches.
    ++update_stamp_;
    const SparseSymStore& ls = lower_.store();
    for (int j : ls.row_cols(c)) {
      const BlockDiag::Block& blk = diag_.block_at(j);
      if (block_stamp_.size() <= static_cast<std::size_t>(diag_.block_of(j)))
        block_stamp_.resize(diag_.blocks().size(), -1);
      int& stamp = block_stamp_[diag_.block_of(j)];
      if (stamp == update_stamp_) continue;
      stamp = update_stamp_;

      const int i0 = blk.start;
      double l1 = 0.0, l2 = 0.0;
      int pos = ls.find_in_col(i0, c, ls.col_first(i0));
      if (pos >= 0) l1 = ls.col_values(i0)[pos];
      if (blk.size == 2) {
        pos = ls.find_in_col(i0 + 1, c, ls.col_first(i0 + 1));
        if (pos >= 0) l2 = ls.col_values(i0 + 1)[pos];
      }

      // t = D_b * (l1, l2)^T
      double t1, t2 = 0.0;
      if (blk.size == 1) {
        t1 = blk.a * l1;
      } else if (kind_ == SymmetryKind::skew) {
        t1 = blk.a * l2;
        t2 = -blk.a * l1;
      } else {
        t1 = blk.a * l1 + blk.b * l2;
        t2 = blk.b * l1 + blk.c * l2;
      }

      if (t1 != 0.0) {
        const SubcolumnView v = ls.subcolumn(i0, k_);
        for (std::size_t p = 0; p < v.count; ++p) buf.add(v.rows[p], -v.values[p] * t1);
      }
      if (blk.size == 2 && t2 != 0.0) {
        const SubcolumnView v = ls.subcolumn(i0 + 1, k_);
        for (std::size_t p = 0; p < v.count; ++p) buf.add(v.rows[p], -v.values[p] * t2);
      }
    }
  }

  /// Largest |entry| of the column over active rows != c, and the lowest row
  /// attaining it.
  std::pair<double, int> omega_of(const detail::WorkColumn& buf, int c) const {
    double best = 0.0;
    int row = -1;
    for (int i : buf.touched) {
      if (i == c) continue;
      const double m = std::abs(buf.val[i]);
      if (m == 0.0) continue;
      if (m > best || (m == best && i < row)) {
        best = m;
        row = i;
      }
    }
    return {best, row};
  }

  PivotDecision decide_none() {
    PivotDecision d;
    const detail::WorkColumn& buf = slots_[compute_into_free_slot(k_)];
    if (kind_ == SymmetryKind::skew) {
      d.size = 2;
      d.static_pivot = buf.val[k_ + 1] == 0.0;
    } else {
      d.size = 1;
      d.static_pivot = buf.val[k_] == 0.0;
    }
    return d;
  }

  PivotDecision decide_bk() {
    const int k = k_;
    PivotDecision d;
    const int s0 = compute_into_free_slot(k);
    const detail::WorkColumn& bk = slots_[s0];
    const auto [w1, r] = omega_of(bk, k);
    const double a11 = std::abs(bk.val[k]);
    if (a11 >= alpha_ * w1) {
      if (w1 == 0.0 && a11 == 0.0) {
        d.static_pivot = true;
        return d;
      }
      d.branch = 1;
      d.audit_lhs = a11;
      d.audit_rhs = alpha_ * w1;
      return d;
    }
    evictable_ = 1 - s0;
    const detail::WorkColumn& br = slots_[compute_into_free_slot(r)];
    const auto [wr, rr] = omega_of(br, r);
    (void)rr;
    if (a11 * wr >= alpha_ * w1 * w1) {
      d.branch = 2;
      d.audit_lhs = a11 * wr;
      d.audit_rhs = alpha_ * w1 * w1;
      return d;
    }
    if (std::abs(br.val[r]) >= alpha_ * wr) {
      d.branch = 3;
      d.audit_lhs = std::abs(br.val[r]);
      d.audit_rhs = alpha_ * wr;
      d.swaps.push_back({k, r});
      return d;
    }
    d.branch = 4;
    d.size = 2;
    d.audit_lhs = w1;  // |a_r1|, the chosen off-diagonal pivot entry
    d.audit_rhs = 0.0;
    if (r != k + 1) d.swaps.push_back({k + 1, r});
    return d;
  }

  PivotDecision decide_rook() {
    const int k = k_;
    PivotDecision d;
    int cand_slot = compute_into_free_slot(k);
    const auto [w1, r1] = omega_of(slots_[cand_slot], k);
    const double a11 = std::abs(slots_[cand_slot].val[k]);
    if (a11 >= alpha_ * w1) {
      if (w1 == 0.0 && a11 == 0.0) {
        d.static_pivot = true;
        return d;
      }
      d.branch = 0;
      return d;
    }
    int cand = k, r = r1;
    double w_cand = w1;
    for (;;) {
      evictable_ = 1 - cand_slot;
      const int r_slot = compute_into_free_slot(r);
      const auto [wr, rnext] = omega_of(slots_[r_slot], r);
      if (std::abs(slots_[r_slot].val[r]) >= alpha_ * wr) {
        d.branch = 1;
        if (r != k) d.swaps.push_back({k, r});
        return d;
      }
      // The pair entry a_{r,cand} attains the maximum of column cand, so
      // omega_r >= omega_cand up to summation roundoff; equality (or a walk
      // that would bounce straight back) means it attains column r's
      // maximum too and the doubly-maximal 2x2 pivot is accepted. Strict
      // growth on every move bounds the walk.
      if (!(wr > w_cand && rnext != cand)) {
        d.branch = 2;
        d.size = 2;
        if (cand != k) d.swaps.push_back({k, cand});
        const int r_after = (r == k) ? cand : r;
        if (r_after != k + 1) d.swaps.push_back({k + 1, r_after});
        return d;
      }
      cand = r;
      w_cand = wr;
      r = rnext;
      cand_slot = r_slot;
    }
  }

  PivotDecision decide_skew_rook() {
    const int k = k_;
    PivotDecision d;
    d.size = 2;
    int cand_slot = compute_into_free_slot(k);
    auto [w1, r1] = omega_of(slots_[cand_slot], k);
    if (w1 == 0.0) {
      d.static_pivot = true;
      return d;
    }
    int cand = k, r = r1;
    double w_cand = w1;
    for (;;) {
      evictable_ = 1 - cand_slot;
      const int r_slot = compute_into_free_slot(r);
      const auto [wr, rnext] = omega_of(slots_[r_slot], r);
      if (!(wr > w_cand && rnext != cand)) {
        if (cand != k) d.swaps.push_back({k, cand});
        const int r_after = (r == k) ? cand : r;
        if (r_after != k + 1) d.swaps.push_back({k + 1, r_after});
        return d;
      }
      cand = r;
      w_cand = wr;
      r = rnext;
      cand_slot = r_slot;
    }
  }

  PivotDecision decide_skew_bunch() {
    const int k = k_;
    PivotDecision d;
    d.size = 2;
    const detail::WorkColumn& bk = slots_[compute_into_free_slot(k)];
    const auto [w1, r] = omega_of(bk, k);
    if (w1 == 0.0) {
      d.static_pivot = true;
      return d;
    }
    d.audit_lhs = w1;
    if (r != k + 1) d.swaps.push_back({k + 1, r});
    return d;
  }

  void apply_swap(int p, int q) {
    if (p == q) return;
    w_.swap_symmetric(p, q);
    lower_.store().swap_rows(p, q);
    perm_.swap_positions(p, q);
    for (auto& s : slots_)
      if (s.label >= 0) {
        s.swap_entries(p, q);
        if (s.label == p)
          s.label = q;
        else if (s.label == q)
          s.label = p;
      }
  }

  template <class Fn>
  void for_each_pair_row(const detail::WorkColumn& c0, const detail::WorkColumn& c1, int k, Fn&& fn) {
    ++update_stamp_;
    for (const detail::WorkColumn* buf : {&c0, &c1})
      for (int i : buf->touched) {
        if (i <= k + 1) continue;
        if (row_stamp_[i] == update_stamp_) continue;
        row_stamp_[i] = update_stamp_;
        const double x = c0.mark[i] ? c0.val[i] : 0.0;
        const double y = c1.mark[i] ? c1.val[i] : 0.0;
        if (x != 0.0 || y != 0.0) fn(i, x, y);
      }
  }

  void finalize_column(int k, std::vector<std::pair<int, double>>& col) {
    double norm = 0.0;
    if (params_.drop_norm == DropNorm::two_norm) {
      for (const auto& e : col) norm += e.second * e.second;
      norm = std::sqrt(norm);
    } else {
      for (const auto& e : col) norm = std::max(norm, std::abs(e.second));
    }
    apply_drop_rules(col, params_, norm, cap_);
    for (const auto& [i, v] : col) lower_.store().append_entry(i, k, v);
  }

  void advance(int k) {
    w_.advance_bi_index(k);
    lower_.store().advance_bi_index(k);
    w_.release_column(k);
  }

  // Rook pivots are re-verified from the final (post-exchange) working
  // columns, which checks the bookkeeping and not just the branch taken;
  // Bunch-Kaufman pivots replay the inequality of their accepting branch.
  void record_audit_1x1(const PivotDecision& d, const detail::WorkColumn& c0, double piv) {
    if (!params_.record_pivot_audit || d.static_pivot || params_.pivot_kind == PivotKind::none)
      return;
    PivotAuditEntry e;
    e.step = k_;
    e.size = 1;
    e.branch = d.branch;
    if (params_.pivot_kind == PivotKind::rook) {
      e.lhs = std::abs(piv);
      e.rhs = alpha_ * omega_of(c0, k_).first;
    } else {
      e.lhs = d.audit_lhs;
      e.rhs = d.audit_rhs;
    }
    e.ok = e.lhs >= e.rhs;
    if (!e.ok) ++diagnostics_.audit_violations;
    diagnostics_.pivot_audit.push_back(e);
  }

  void record_audit_2x2(const PivotDecision& d, const detail::WorkColumn& c0,
                        const detail::WorkColumn& c1) {
    if (!params_.record_pivot_audit || d.static_pivot || params_.pivot_kind == PivotKind::none)
      return;
    PivotAuditEntry e;
    e.step = k_;
    e.size = 2;
    e.branch = d.branch;
    if (params_.pivot_kind == PivotKind::rook) {
      // The pivot entry must attain the magnitude maximum of both of its
      // columns over the active submatrix. The mirrored copy of the pair
      // entry is summed in a different order, so allow a few ulps.
      e.lhs = std::abs(c0.val[k_ + 1]);
      e.rhs = std::max(omega_of(c0, k_).first, omega_of(c1, k_ + 1).first);
      e.ok = e.lhs >= e.rhs * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    } else {
      e.lhs = d.audit_lhs;
      e.rhs = d.audit_rhs;
      e.ok = e.lhs > e.rhs || (e.lhs > 0.0 && e.rhs == 0.0);
    }
    if (!e.ok) ++diagnostics_.audit_violations;
    diagnostics_.pivot_audit.push_back(e);
  }

  SparseSymStore w_;
  FactorParams params_;
  int n_ = 0;
  SymmetryKind kind_ = SymmetryKind::symmetric;
  UnitLowerFactor lower_;
  BlockDiag diag_;
  Permutation perm_;
  FactorDiagnostics diagnostics_;
  std::size_t cap_ = 0;
  double shift_ = 0.0;
  int k_ = 0;
  int evictable_ = 0;
  int update_stamp_ = 0;
  std::vector<int> block_stamp_;
  std::vector<int> row_stamp_;
  std::array<detail::WorkColumn, 2> slots_;
  static constexpr double alpha_ = 0.64038820320220756872767623199676;  // (1+sqrt(17))/8
};

/// P A P^T ~= L D L^T for a symmetric store; skew stores dispatch to the
/// skew path. The store is consumed (pass a copy to keep the input).
inline FactorResult ildl_factor(SparseSymStore a, const FactorParams& params = {}) {
  CroutFactorizer f(std::move(a), params);
  return f.run();
}

inline FactorResult skew_ildl_factor(SparseSymStore a, const FactorParams& params = {}) {
  if (a.kind() != SymmetryKind::skew)
    throw std::invalid_argument("skew_ildl_factor: store is not skew-symmetric");
  return ildl_factor(std::move(a), params);
}

/// fill = nnz(L + D + L^T) / nnz(A): off-diagonal entries of L count twice,
/// D contributes its structural nonzeros, L's unit diagonal is excluded.
inline double fill_of(const UnitLowerFactor& l, const BlockDiag& d, const SparseSymStore& a) {
  return (2.0 * static_cast<double>(l.nnz()) + static_cast<double>(d.structural_nnz())) /
         static_cast<double>(a.nnz_full());
}

/// Dense L D L^T (row-major), accumulated block by block over the lower
/// triangle and mirrored, so the result is exactly symmetric (resp. skew).
inline std::vector<double> reconstruct_dense(const UnitLowerFactor& l, const BlockDiag& d) {
  const int n = l.n();
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  const SparseSymStore& ls = l.store();

  std::vector<std::pair<int, double>> c0, c1;
  for (const BlockDiag::Block& blk : d.blocks()) {
    c0.clear();
    c1.clear();
    c0.push_back({blk.start, 1.0});
    for (std::size_t p = 0; p < ls.col_rows(blk.start).size(); ++p)
      c0.push_back({ls.col_rows(blk.start)[p], ls.col_values(blk.start)[p]});
    if (blk.size == 2) {
      c1.push_back({blk.start + 1, 1.0});
      for (std::size_t p = 0; p < ls.col_rows(blk.start + 1).size(); ++p)
        c1.push_back({ls.col_rows(blk.start + 1)[p], ls.col_values(blk.start + 1)[p]});
    }

    // Row i of the block's column pair.
    auto pair_rows = [&]() {
      std::vector<std::tuple<int, double, double>> rows;
      for (const auto& [i, v] : c0) rows.push_back({i, v, 0.0});
      for (const auto& [i, v] : c1) {
        bool found = false;
        for (auto& [ri, x0, x1] : rows)
          if (ri == i) {
            x1 = v;
            found = true;
            break;
          }
        if (!found) rows.push_back({i, 0.0, v});
      }
      return rows;
    };
    std::vector<std::tuple<int, double, double>> rows = pair_rows();

    for (const auto& [i, xi0, xi1] : rows)
      for (const auto& [j, xj0, xj1] : rows) {
        if (j > i) continue;
        double v;
        if (blk.size == 1) {
          v = xi0 * blk.a * xj0;
        } else if (d.kind() == SymmetryKind::skew) {
          v = blk.a * (xi0 * xj1 - xi1 * xj0);
        } else {
          v = xi0 * (blk.a * xj0 + blk.b * xj1) + xi1 * (blk.b * xj0 + blk.c * xj1);
        }
        out[static_cast<std::size_t>(i) * n + j] += v;
      }
  }

  for (int i = 0; i < n; ++i) {
    if (d.kind() == SymmetryKind::skew) out[static_cast<std::size_t>(i) * n + i] = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = out[static_cast<std::size_t>(j) * n + i];
      out[static_cast<std::size_t>(i) * n + j] = d.kind() == SymmetryKind::skew ? -v : v;
    }
  }
  return out;
}

}  // namespace ildl
