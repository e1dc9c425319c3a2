// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ildl {

enum class SymmetryKind { symmetric, skew };

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Row/column permutation P with its inverse. Convention: applying P to a
/// matrix gives (PAP^T)(i,j) = A(forward[i], forward[j]).
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(int n) : forward_(n), inverse_(n) {
    std::iota(forward_.begin(), forward_.end(), 0);
    std::iota(inverse_.begin(), inverse_.end(), 0);
  }

  static Permutation identity(int n) { return Permutation(n); }

  /// Builds a permutation from an explicit forward map (validated bijection).
  static Permutation from_forward(std::vector<int> forward) {
    Permutation p;
    const int n = static_cast<int>(forward.size());
    p.forward_ = std::move(forward);
    p.inverse_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      const int f = p.forward_[i];
      if (f < 0 || f >= n || p.inverse_[f] != -1)
        throw std::invalid_argument("Permutation::from_forward: not a bijection");
      p.inverse_[f] = i;
    }
    return p;
  }

  int size() const { return static_cast<int>(forward_.size()); }
  int forward(int i) const { return forward_[i]; }
  int inverse(int i) const { return inverse_[i]; }
  const std::vector<int>& forward_map() const { return forward_; }
  const std::vector<int>& inverse_map() const { return inverse_; }

  void swap_positions(int a, int b) {
    std::swap(forward_[a], forward_[b]);
    inverse_[forward_[a]] = a;
    inverse_[forward_[b]] = b;
  }

  bool is_identity() const {
    for (int i = 0; i < size(); ++i)
      if (forward_[i] != i) return false;
    return true;
  }

  /// Composition: result represents applying `inner` first, then `outer`,
  /// i.e. forward[i] = inner.forward[outer.forward[i]].
  static Permutation compose(const Permutation& inner, const Permutation& outer) {
    const int n = inner.size();
    std::vector<int> f(n);
    for (int i = 0; i < n; ++i) f[i] = inner.forward_[outer.forward_[i]];
    return from_forward(std::move(f));
  }

  /// y[i] = x[forward[i]]  (applies P to a vector).
  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const int n = size();
    y.resize(n);
    for (int i = 0; i < n; ++i) y[i] = x[forward_[i]];
  }

  /// y[forward[i]] = x[i]  (applies P^T).
  void apply_transpose(const std::vector<double>& x, std::vector<double>& y) const {
    const int n = size();
    y.resize(n);
    for (int i = 0; i < n; ++i) y[forward_[i]] = x[i];
  }

 private:
  std::vector<int> forward_;
  std::vector<int> inverse_;
};

/// Lightweight view of the active tail of one stored column.
struct SubcolumnView {
  const int* rows = nullptr;
  const double* values = nullptr;
  std::size_t count = 0;
};

/// Sparse container for (skew-)symmetric matrices holding only the lower
/// triangle in list-of-arrays form: per-column value/index arrays, a
/// row-major pattern mirror, and the col_first/row_first offsets that split
/// every column and row pattern into an eliminated prefix and an active
/// suffix during factorization.
///
/// Symmetric stores hold entries with i >= j; skew stores hold i > j (the
/// diagonal of a real skew-symmetric matrix is identically zero). Within the
/// prefix/suffix segments entry order is unspecified: middle removals swap
/// the victim to the tail, and pivoting swaps relabel indices in place.
class SparseSymStore {
 public:
  SparseSymStore() = default;

  SparseSymStore(int n, SymmetryKind kind)
      : n_(n),
        kind_(kind),
        col_val_(n),
        col_list_(n),
        row_list_(n),
        col_first_(n, 0),
        row_first_(n, 0) {}

  /// Builds a store from triplets. Entries above the diagonal are mirrored
  /// into the lower triangle (skew entries change sign). Duplicates throw,
  /// explicit zeros are dropped, columns end up sorted by row index.
  static SparseSymStore build(int n, SymmetryKind kind, const std::vector<Triplet>& entries) {
    SparseSymStore s(n, kind);
    for (const Triplet& t : entries) {
      int i = t.row, j = t.col;
      double v = t.value;
      if (i < 0 || i >= n || j < 0 || j >= n)
        throw std::invalid_argument("SparseSymStore::build: index out of range");
      if (i < j) {
        std::swap(i, j);
        if (kind == SymmetryKind::skew) v = -v;
      }
      if (i == j && kind == SymmetryKind::skew) {
        if (v != 0.0)
          throw std::invalid_argument("SparseSymStore::build: nonzero diagonal in skew store");
        continue;
      }
      if (v == 0.0) continue;
      s.col_list_[j].push_back(i);
      s.col_val_[j].push_back(v);
    }
    s.sort_columns_and_check_duplicates();
    s.rebuild_row_pattern();
    s.sorted_hint_ = true;
    return s;
  }

  int n() const { return n_; }
  SymmetryKind kind() const { return kind_; }
  bool sorted_hint() const { return sorted_hint_; }
  void set_sorted_hint(bool v) { sorted_hint_ = v; }

  const std::vector<int>& col_rows(int j) const { return col_list_[j]; }
  const std::vector<double>& col_values(int j) const { return col_val_[j]; }
  const std::vector<int>& row_cols(int i) const { return row_list_[i]; }
  int col_first(int j) const { return col_first_[j]; }
  int row_first(int i) const { return row_first_[i]; }

  std::size_t nnz_stored() const {
    std::size_t total = 0;
    for (const auto& c : col_list_) total += c.size();
    return total;
  }

  /// Structural nonzeros of the represented matrix, mirror included.
  std::size_t nnz_full() const {
    std::size_t diag = 0, off = 0;
    for (int j = 0; j < n_; ++j)
      for (int i : col_list_[j]) (i == j ? diag : off) += 1;
    return 2 * off + diag;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& vals : col_val_)
      for (double v : vals) m = std::max(m, std::abs(v));
    return m;
  }

  std::vector<Triplet> to_triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz_stored());
    for (int j = 0; j < n_; ++j)
      for (std::size_t p = 0; p < col_list_[j].size(); ++p)
        out.push_back({col_list_[j][p], j, col_val_[j][p]});
    return out;
  }

  /// Value lookup by (i, j) in lower-triangle coordinates; 0 when absent.
  /// Linear search; intended for tests and small matrices.
  double entry(int i, int j) const {
    if (i < j) {
      double v = entry(j, i);
      return kind_ == SymmetryKind::skew ? -v : v;
    }
    const auto& rows = col_list_[j];
    for (std::size_t p = 0; p < rows.size(); ++p)
      if (rows[p] == i) return col_val_[j][p];
    return 0.0;
  }

  /// Position of row `r` within column `j` searching from `from_pos`; -1 if absent.
  int find_in_col(int j, int r, int from_pos = 0) const {
    const auto& rows = col_list_[j];
    for (std::size_t p = from_pos; p < rows.size(); ++p)
      if (rows[p] == r) return static_cast<int>(p);
    return -1;
  }

  void append_entry(int i, int j, double v) {
    col_list_[j].push_back(i);
    col_val_[j].push_back(v);
    row_list_[i].push_back(j);
  }

  /// Active tail of column i (rows >= `from`, assuming the bi-index is
  /// current for step `from`). O(1), no copies; segment order unspecified.
  SubcolumnView subcolumn(int i, int from) const {
    const int b = col_first_[i];
    SubcolumnView v;
    v.rows = col_list_[i].data() + b;
    v.values = col_val_[i].data() + b;
    v.count = col_list_[i].size() - b;
#ifndef NDEBUG
    for (std::size_t p = 0; p < v.count; ++p) assert(v.rows[p] >= from);
#endif
    (void)from;
    return v;
  }

  /// Symmetric row/column exchange p <-> q. Stored entries touching p or q
  /// are extracted, relabeled and reinserted at segment tails, so offsets
  /// for already-eliminated columns stay valid. Entries whose lower-triangle
  /// position transposes under the exchange flip sign in a skew store.
  /// Pattern-only entries referring to released columns are carried by
  /// swapping the whole row lists.
  void swap_symmetric(int p, int q) {
    check_index(p);
    check_index(q);
    if (p == q) return;
    if (p > q) std::swap(p, q);

    std::vector<Triplet> moved;

    for (int c : {p, q}) {
      for (std::size_t pos = 0; pos < col_list_[c].size(); ++pos)
        moved.push_back({col_list_[c][pos], c, col_val_[c][pos]});
      for (std::size_t pos = 0; pos < col_list_[c].size(); ++pos) {
        const int i = col_list_[c][pos];
        remove_from_row_pattern(i, c);
      }
      col_list_[c].clear();
      col_val_[c].clear();
      col_first_[c] = 0;
    }

    for (int x : {p, q}) {
      std::vector<int> cols = row_list_[x];
      for (int j : cols) {
        if (j == p || j == q) continue;
        const int pos = find_in_col(j, x);
        if (pos < 0) continue;  // released column: pattern-only, handled by the row swap
        moved.push_back({x, j, col_val_[j][pos]});
        remove_col_entry(j, pos);
        remove_from_row_pattern(x, j);
      }
    }

    std::swap(row_list_[p], row_list_[q]);
    std::swap(row_first_[p], row_first_[q]);

    auto relabel = [&](int i) { return i == p ? q : (i == q ? p : i); };
    for (const Triplet& t : moved) {
      int i = relabel(t.row), j = relabel(t.col);
      double v = t.value;
      if (i < j) {
        std::swap(i, j);
        if (kind_ == SymmetryKind::skew) v = -v;
      }
      col_list_[j].push_back(i);
      col_val_[j].push_back(v);
      row_list_[i].push_back(j);
    }
    sorted_hint_ = false;
  }

  /// Row-only exchange p <-> q for strictly lower stores (the L factor).
  /// Entries keep their columns and values; only row labels change.
  void swap_rows(int p, int q) {
    check_index(p);
    check_index(q);
    if (p == q) return;
    std::vector<int> cols = row_list_[p];
    cols.insert(cols.end(), row_list_[q].begin(), row_list_[q].end());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    for (int j : cols) {
      const int pos_p = find_in_col(j, p, col_first_[j]);
      const int pos_q = find_in_col(j, q, col_first_[j]);
      if (pos_p >= 0) col_list_[j][pos_p] = q;
      if (pos_q >= 0) col_list_[j][pos_q] = p;
    }
    std::swap(row_list_[p], row_list_[q]);
    std::swap(row_first_[p], row_first_[q]);
    sorted_hint_ = false;
  }

  /// Moves the step-k boundary one step forward: every column holding row k
  /// swaps that entry to the front of its active segment and advances
  /// col_first past it; rows holding column k advance row_first the same
  /// way. Columns and rows not touching index k need no work.
  void advance_bi_index(int k) {
    for (int j : row_list_[k]) {
      auto& rows = col_list_[j];
      auto& vals = col_val_[j];
      int& b = col_first_[j];
      for (std::size_t pos = b; pos < rows.size(); ++pos) {
        if (rows[pos] == k) {
          std::swap(rows[pos], rows[b]);
          std::swap(vals[pos], vals[b]);
          ++b;
          break;
        }
      }
    }
    for (int i : col_list_[k]) {
      auto& cols = row_list_[i];
      int& b = row_first_[i];
      for (std::size_t pos = b; pos < cols.size(); ++pos) {
        if (cols[pos] == k) {
          std::swap(cols[pos], cols[b]);
          ++b;
          break;
        }
      }
    }
  }

  /// Releases the memory of a fully processed column; its row-pattern
  /// entries become inert prefix residue skipped via row_first.
  void release_column(int j) {
    col_list_[j].clear();
    col_list_[j].shrink_to_fit();
    col_val_[j].clear();
    col_val_[j].shrink_to_fit();
    col_first_[j] = 0;
  }

  /// Debug audit of the segment invariants at step k: parallel arrays,
  /// triangle shape, per-column uniqueness, prefix/suffix split of both
  /// offsets, and row-pattern mirror consistency for live columns.
  void audit_bi_index(int k) const {
    for (int j = 0; j < n_; ++j) {
      if (col_list_[j].size() != col_val_[j].size())
        throw std::logic_error("audit: value/index arrays out of sync");
      const int b = col_first_[j];
      if (b < 0 || b > static_cast<int>(col_list_[j].size()))
        throw std::logic_error("audit: col_first out of range");
      std::vector<int> seen;
      for (std::size_t pos = 0; pos < col_list_[j].size(); ++pos) {
        const int i = col_list_[j][pos];
        if (i < j || (kind_ == SymmetryKind::skew && i == j))
          throw std::logic_error("audit: entry outside stored triangle");
        if (static_cast<int>(pos) < b && i >= k)
          throw std::logic_error("audit: active row in eliminated prefix");
        if (static_cast<int>(pos) >= b && i < k)
          throw std::logic_error("audit: eliminated row in active suffix");
        seen.push_back(i);
      }
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw std::logic_error("audit: duplicate entry in column");
    }
    for (int i = 0; i < n_; ++i) {
      const int b = row_first_[i];
      if (b < 0 || b > static_cast<int>(row_list_[i].size()))
        throw std::logic_error("audit: row_first out of range");
      for (std::size_t pos = 0; pos < row_list_[i].size(); ++pos) {
        const int j = row_list_[i][pos];
        if (static_cast<int>(pos) < b && j >= k)
          throw std::logic_error("audit: active column in eliminated row prefix");
        if (static_cast<int>(pos) >= b && j < k)
          throw std::logic_error("audit: eliminated column in active row suffix");
        if (!col_list_[j].empty() && find_in_col(j, i) < 0)
          throw std::logic_error("audit: row pattern without matching column entry");
      }
    }
  }

  /// Multiplies every stored entry (i,j) by d[i]*d[j].
  void scale_symmetric(const std::vector<double>& d) {
    for (int j = 0; j < n_; ++j)
      for (std::size_t p = 0; p < col_list_[j].size(); ++p)
        col_val_[j][p] *= d[col_list_[j][p]] * d[j];
  }

  /// Sorts each column by row index (load-time canonical form).
  void sort_columns() {
    for (int j = 0; j < n_; ++j) sort_one_column(j);
    rebuild_row_pattern();
    sorted_hint_ = true;
  }

 private:
  void check_index(int i) const {
    if (i < 0 || i >= n_) throw std::invalid_argument("SparseSymStore: index out of range");
  }

  void sort_one_column(int j) {
    auto& rows = col_list_[j];
    auto& vals = col_val_[j];
    const std::size_t len = rows.size();
    std::vector<int> order(len);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return rows[a] < rows[b]; });
    std::vector<int> r2(len);
    std::vector<double> v2(len);
    for (std::size_t p = 0; p < len; ++p) {
      r2[p] = rows[order[p]];
      v2[p] = vals[order[p]];
    }
    rows.swap(r2);
    vals.swap(v2);
  }

  void sort_columns_and_check_duplicates() {
    for (int j = 0; j < n_; ++j) {
      sort_one_column(j);
      const auto& rows = col_list_[j];
      for (std::size_t p = 1; p < rows.size(); ++p)
        if (rows[p] == rows[p - 1])
          throw std::invalid_argument("SparseSymStore::build: duplicate entry (" +
                                      std::to_string(rows[p] + 1) + "," + std::to_string(j + 1) + ")");
    }
  }

  void rebuild_row_pattern() {
    for (auto& r : row_list_) r.clear();
    for (int j = 0; j < n_; ++j)
      for (int i : col_list_[j]) row_list_[i].push_back(j);
  }

  void remove_col_entry(int j, int pos) {
    auto& rows = col_list_[j];
    auto& vals = col_val_[j];
    rows[pos] = rows.back();
    rows.pop_back();
    vals[pos] = vals.back();
    vals.pop_back();
  }

  void remove_from_row_pattern(int i, int j) {
    auto& cols = row_list_[i];
    for (std::size_t p = 0; p < cols.size(); ++p) {
      if (cols[p] == j) {
        cols[p] = cols.back();
        cols.pop_back();
        return;
      }
    }
  }

  int n_ = 0;
  SymmetryKind kind_ = SymmetryKind::symmetric;
  bool sorted_hint_ = false;
  std::vector<std::vector<double>> col_val_;
  std::vector<std::vector<int>> col_list_;
  std::vector<std::vector<int>> row_list_;
  std::vector<int> col_first_;
  std::vector<int> row_first_;
};

}  // namespace ildl
