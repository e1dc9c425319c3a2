// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "ildl/storage.hpp"

namespace ildl {

/// Diagonal scaling factors; the same factors apply on both sides (DAD).
struct ScalingDiag {
  std::vector<double> d;

  static ScalingDiag ones(int n) { return {std::vector<double>(n, 1.0)}; }
  int size() const { return static_cast<int>(d.size()); }
};

inline void apply_scaling(SparseSymStore& a, const ScalingDiag& s) { a.scale_symmetric(s.d); }

inline void apply_inverse_scaling(SparseSymStore& a, const ScalingDiag& s) {
  std::vector<double> inv(s.d.size());
  for (std::size_t i = 0; i < s.d.size(); ++i) inv[i] = 1.0 / s.d[i];
  a.scale_symmetric(inv);
}

namespace detail {

// Undirected adjacency of the pattern of A + A^T, diagonal dropped.
inline std::vector<std::vector<int>> adjacency(const SparseSymStore& a) {
  const int n = a.n();
  std::vector<std::vector<int>> adj(n);
  for (int j = 0; j < n; ++j)
    for (int i : a.col_rows(j)) {
      if (i == j) continue;
      adj[j].push_back(i);
      adj[i].push_back(j);
    }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return adj;
}

}  // namespace detail

/// One-pass greedy max-norm equilibration. Walking columns left to right,
/// each diagonal factor is fixed from the already-final factors:
///   D_ii = 1 / max( sqrt(|A_ii|), max_{j<i} D_jj |A_ij| ),
/// so every entry of DAD has magnitude at most 1 and each structurally
/// nonzero row of the lower triangle attains 1. Rows whose maximum is zero
/// keep D_ii = 1.
inline ScalingDiag bunch_equilibrate(const SparseSymStore& a) {
  const int n = a.n();
  std::vector<double> d(n, 1.0);
  std::vector<double> best(n, 0.0);  // max over finished columns of D_jj |A_ij|
  for (int j = 0; j < n; ++j) {
    double diag = 0.0;
    const auto& rows = a.col_rows(j);
    const auto& vals = a.col_values(j);
    for (std::size_t p = 0; p < rows.size(); ++p)
      if (rows[p] == j) diag = std::abs(vals[p]);
    const double m = std::max(std::sqrt(diag), best[j]);
    d[j] = m > 0.0 ? 1.0 / m : 1.0;
    for (std::size_t p = 0; p < rows.size(); ++p) {
      const int i = rows[p];
      if (i == j) continue;
      best[i] = std::max(best[i], d[j] * std::abs(vals[p]));
    }
  }
  return {std::move(d)};
}

struct RuizResult {
  ScalingDiag scaling;
  bool converged = false;
  int sweeps = 0;
};

/// Iterative max-norm equilibration, one index at a time: each visit scales
/// row and column i by 1/sqrt(max-norm). For (skew-)symmetric input the row
/// and column norms coincide, so a single factor per index keeps the scaled
/// matrix exactly (skew-)symmetric. Converges when every row max-norm is
/// within epsilon of 1.
inline RuizResult ruiz_equilibrate(const SparseSymStore& a, double epsilon = 1e-4,
                                   int max_sweeps = 100) {
  if (epsilon <= 0.0) throw std::invalid_argument("ruiz_equilibrate: epsilon must be positive");
  const int n = a.n();
  std::vector<double> d(n, 1.0);

  auto row_max = [&](int i) {
    double m = 0.0;
    // stored row entries (i, j), j <= i
    for (int j : a.row_cols(i)) {
      const int pos = a.find_in_col(j, i);
      m = std::max(m, d[i] * std::abs(a.col_values(j)[pos]) * d[j]);
    }
    // mirrored column entries (r, i), r > i
    const auto& rows = a.col_rows(i);
    const auto& vals = a.col_values(i);
    for (std::size_t p = 0; p < rows.size(); ++p)
      if (rows[p] != i) m = std::max(m, d[i] * std::abs(vals[p]) * d[rows[p]]);
    return m;
  };

  RuizResult result;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      const double m = row_max(i);
      if (m == 0.0) throw std::invalid_argument("ruiz_equilibrate: row " + std::to_string(i + 1) +
                                                " has no nonzero entries");
      d[i] /= std::sqrt(m);
    }
    result.sweeps = sweep;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(row_max(i) - 1.0));
    if (worst <= epsilon) {
      result.converged = true;
      break;
    }
  }
  result.scaling = ScalingDiag{std::move(d)};
  return result;
}

/// Reverse Cuthill-McKee. Each component starts from its minimum-degree
/// vertex (lowest index on ties); neighbors enqueue in (degree, index)
/// order. Components are traversed in descending start order so that the
/// final reversal emits them ascending, which maps a diagonal matrix to the
/// identity permutation.
inline Permutation rcm_order(const SparseSymStore& a) {
  const int n = a.n();
  const auto adj = detail::adjacency(a);
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) degree[i] = static_cast<int>(adj[i].size());

  std::vector<int> component(n, -1);
  std::vector<int> starts;
  for (int v = 0; v < n; ++v) {
    if (component[v] >= 0) continue;
    const int c = static_cast<int>(starts.size());
    std::vector<int> members;
    std::queue<int> bfs;
    bfs.push(v);
    component[v] = c;
    while (!bfs.empty()) {
      const int u = bfs.front();
      bfs.pop();
      members.push_back(u);
      for (int w : adj[u])
        if (component[w] < 0) {
          component[w] = c;
          bfs.push(w);
        }
    }
    int start = members[0];
    for (int u : members)
      if (degree[u] < degree[start] || (degree[u] == degree[start] && u < start)) start = u;
    starts.push_back(start);
  }
  std::sort(starts.begin(), starts.end(), std::greater<int>());

  std::vector<int> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  for (int start : starts) {
    std::queue<int> bfs;
    bfs.push(start);
    visited[start] = 1;
    while (!bfs.empty()) {
      const int u = bfs.front();
      bfs.pop();
      order.push_back(u);
      std::vector<int> next;
      for (int w : adj[u])
        if (!visited[w]) {
          visited[w] = 1;
          next.push_back(w);
        }
      std::sort(next.begin(), next.end(),
                [&](int x, int y) { return degree[x] != degree[y] ? degree[x] < degree[y] : x < y; });
      for (int w : next) bfs.push(w);
    }
  }
  std::reverse(order.begin(), order.end());
  return Permutation::from_forward(std::move(order));
}

/// Approximate minimum degree ordering on the quotient graph, with the
/// external-degree bound and aggressive element absorption. Ties break on
/// the lowest original index. Vertices with initial degree above 10*sqrt(n)
/// are postponed and ordered last.
inline Permutation amd_order(const SparseSymStore& a) {
  const int n = a.n();
  auto adj = detail::adjacency(a);

  std::vector<int> degree(n);
  std::vector<char> eliminated(n, 0);
  std::vector<char> postponed(n, 0);
  std::vector<std::vector<int>> var_elems(n);       // element ids adjacent to a variable
  std::vector<std::vector<int>> elem_members;       // element id -> live member variables
  std::vector<char> elem_alive;
  std::vector<int> stamp(n, -1);
  std::vector<int> elem_stamp;
  std::vector<int> elem_w;

  const double dense_cut = 10.0 * std::sqrt(static_cast<double>(n));
  std::set<std::pair<int, int>> heap;
  for (int v = 0; v < n; ++v) {
    degree[v] = static_cast<int>(adj[v].size());
    if (degree[v] > dense_cut)
      postponed[v] = 1;
    else
      heap.insert({degree[v], v});
  }

  std::vector<int> order;
  order.reserve(n);
  int round = 0;

  while (!heap.empty()) {
    const auto [deg, p] = *heap.begin();
    heap.erase(heap.begin());
    eliminated[p] = 1;
    order.push_back(p);
    ++round;

    // Lp: live variables adjacent to p directly or through p's elements.
    std::vector<int> lp;
    stamp[p] = round;
    auto add_member = [&](int v) {
      if (eliminated[v] || postponed[v] || stamp[v] == round) return;
      stamp[v] = round;
      lp.push_back(v);
    };
    for (int v : adj[p]) add_member(v);
    for (int e : var_elems[p])
      if (elem_alive[e])
        for (int v : elem_members[e]) add_member(v);

    // Old elements reached through p are absorbed into the new one.
    for (int e : var_elems[p])
      if (elem_alive[e]) elem_alive[e] = 0;

    const int new_elem = static_cast<int>(elem_members.size());
    elem_members.push_back(lp);
    elem_alive.push_back(1);
    elem_stamp.push_back(-1);
    elem_w.push_back(0);

    // |L_e \ Lp| for every live element touching Lp, in one pass.
    for (int v : lp)
      for (int e : var_elems[v]) {
        if (!elem_alive[e] || e == new_elem) continue;
        if (elem_stamp[e] != round) {
          elem_stamp[e] = round;
          int live = 0;
          for (int u : elem_members[e])
            if (!eliminated[u] && !postponed[u]) ++live;
          elem_w[e] = live;
        }
        --elem_w[e];
      }

    for (int v : lp) {
      // Prune original edges now covered by the new element, and compact
      // the element list, absorbing exhausted elements.
      auto& av = adj[v];
      av.erase(std::remove_if(av.begin(), av.end(),
                              [&](int u) {
                                return u == p || eliminated[u] ||
                                       (stamp[u] == round && u != v);
                              }),
               av.end());
      auto& ev = var_elems[v];
      int ext_sum = 0;
      std::vector<int> kept;
      for (int e : ev) {
        if (!elem_alive[e]) continue;
        if (elem_stamp[e] == round && elem_w[e] == 0) {
          elem_alive[e] = 0;  // aggressive absorption: L_e subset of Lp
          continue;
        }
        kept.push_back(e);
        if (elem_stamp[e] == round) ext_sum += elem_w[e];
      }
      kept.push_back(new_elem);
      ev.swap(kept);

      const int bound_world = n - static_cast<int>(order.size());
      const int bound_growth = degree[v] + static_cast<int>(lp.size()) - 1;
      const int bound_external =
          static_cast<int>(av.size()) + static_cast<int>(lp.size()) - 1 + ext_sum;
      const int d_new = std::max(1, std::min({bound_world, bound_growth, bound_external}));
      heap.erase({degree[v], v});
      degree[v] = d_new;
      heap.insert({degree[v], v});
    }
  }

  for (int v = 0; v < n; ++v)
    if (postponed[v]) order.push_back(v);
  return Permutation::from_forward(std::move(order));
}

}  // namespace ildl
