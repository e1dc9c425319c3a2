// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>
#include <set>

#include "ildl/factorization.hpp"
#include "ildl/problems.hpp"
#include "test_helpers.hpp"

using ildl::BlockDiag;
using ildl::CroutFactorizer;
using ildl::FactorParams;
using ildl::FactorResult;
using ildl::fill_of;
using ildl::ildl_factor;
using ildl::PivotDecision;
using ildl::PivotKind;
using ildl::skew_ildl_factor;
using ildl::SparseSymStore;
using ildl::SymmetryKind;
using ildl::Triplet;
using ildl::testing::to_dense;

namespace {

FactorParams no_drop(PivotKind pk = PivotKind::rook) {
  FactorParams p;
  p.drop_tol = 0.0;
  p.fill_factor = std::numeric_limits<double>::infinity();
  p.pivot_kind = pk;
  return p;
}

SparseSymStore sym2x2(double a, double b, double c) {
  std::vector<Triplet> t;
  if (a != 0.0) t.push_back({0, 0, a});
  if (b != 0.0) t.push_back({1, 0, b});
  if (c != 0.0) t.push_back({1, 1, c});
  return SparseSymStore::build(2, SymmetryKind::symmetric, t);
}

// The spec'd 4x4 skew example matrix.
SparseSymStore skew4x4() {
  return SparseSymStore::build(
      4, SymmetryKind::skew, {{1, 0, -1.0}, {3, 0, -2.0}, {2, 1, -3.0}, {3, 2, -4.0}});
}

}  // namespace

TEST_CASE("column_update", "[factorization]") {
  SECTION("first column is A's column unchanged") {
    SparseSymStore a = sym2x2(2.0, 1.0, 2.0);
    CroutFactorizer f(a, no_drop());
    const auto& buf = f.update_column(0);
    REQUIRE(buf.val[0] == 2.0);
    REQUIRE(buf.val[1] == 1.0);
  }
  SECTION("one-step Schur complement by hand") {
    SparseSymStore a = sym2x2(2.0, 1.0, 2.0);
    CroutFactorizer f(a, no_drop());
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 1);
    f.eliminate(d);
    const auto& buf = f.update_column(1);
    REQUIRE(buf.val[1] == Catch::Approx(1.5).epsilon(1e-15));
  }
  SECTION("skew updates follow the 2x2 block inverse formula") {
    SparseSymStore a = skew4x4();
    CroutFactorizer f(a, no_drop(PivotKind::none));
    f.eliminate(f.decide_pivot());
    const auto& buf = f.update_column(2);

    // Dense Schur oracle: A22 - A21 B^{-1} A12.
    const Eigen::MatrixXd ad = to_dense(a);
    const Eigen::MatrixXd schur =
        ad.block(2, 2, 2, 2) -
        ad.block(2, 0, 2, 2) * ad.block(0, 0, 2, 2).inverse() * ad.block(0, 2, 2, 2);
    REQUIRE(buf.val[2] == Catch::Approx(schur(0, 0)).margin(1e-14));
    REQUIRE(buf.val[3] == Catch::Approx(schur(1, 0)).margin(1e-14));
    REQUIRE(schur(1, 0) == -10.0);
  }
}

TEST_CASE("bunch-kaufman pivot branches", "[factorization]") {
  FactorParams p = no_drop(PivotKind::bunch_kaufman);
  SECTION("large diagonal takes the first branch") {
    SparseSymStore a = sym2x2(1.0, 0.5, 0.1);
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 1);
    REQUIRE(d.branch == 1);
    REQUIRE(d.swaps.empty());
  }
  SECTION("[[0,1],[1,0]] falls through to a 2x2 pivot") {
    SparseSymStore a = sym2x2(0.0, 1.0, 0.0);
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 2);
    REQUIRE(d.branch == 4);
    REQUIRE(d.swaps.empty());  // r == k+1 already
  }
  SECTION("[[1,4],[4,1]] fails all three 1x1 tests") {
    SparseSymStore a = sym2x2(1.0, 4.0, 1.0);
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    // 1 < 0.6404*4; 1*4 < 0.6404*16; 1 < 0.6404*4.
    REQUIRE(d.size == 2);
    REQUIRE(d.branch == 4);
  }
}

TEST_CASE("rook pivot spiral", "[factorization]") {
  FactorParams p = no_drop(PivotKind::rook);
  SECTION("dominant diagonal needs no walk") {
    SparseSymStore a = sym2x2(3.0, 1.0, 0.5);
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 1);
    REQUIRE(d.branch == 0);
    REQUIRE(d.swaps.empty());
  }
  SECTION("walk 0 -> 1 -> pair (1,2)") {
    // [[0,1,0],[1,0,2],[0,2,0]]
    SparseSymStore a = SparseSymStore::build(
        3, SymmetryKind::symmetric, {{1, 0, 1.0}, {2, 1, 2.0}});
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 2);
    // pivot pair is (1,2): swaps (0,1) then (1,2)
    REQUIRE(d.swaps == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    FactorResult r = ildl_factor(a, p);
    REQUIRE(r.diag_blocks.blocks()[0].size == 2);
    REQUIRE(std::abs(r.diag_blocks.blocks()[0].b) == 2.0);
    // The matrix is singular: the trailing Schur entry is exactly zero and
    // static pivoting injects the shift, which bounds the residual.
    REQUIRE(r.diagnostics.static_pivots == 1);
    REQUIRE(ildl::testing::reconstruction_residual(a, r) < 1e-8);
  }
  SECTION("zero diagonal 2x2 pivots immediately") {
    SparseSymStore a = sym2x2(0.0, 7.0, 0.0);
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 2);
  }
}

TEST_CASE("skew rook pivot", "[factorization]") {
  FactorParams p = no_drop(PivotKind::rook);
  SECTION("single candidate accepts without swaps") {
    SparseSymStore a = SparseSymStore::build(2, SymmetryKind::skew, {{1, 0, -2.0}});
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 2);
    REQUIRE(d.swaps.empty());
  }
  SECTION("walk follows growing column maxima") {
    // col 0 max 1 at row 1; col 1 max 3 at row 3; col 3 max 3 -> pivot (1,3).
    SparseSymStore a = SparseSymStore::build(
        4, SymmetryKind::skew, {{1, 0, 1.0}, {3, 1, 3.0}, {2, 0, 0.5}});
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 2);
    REQUIRE(d.swaps == std::vector<std::pair<int, int>>{{0, 1}, {1, 3}});
  }
  SECTION("zero skew matrix exercises the static path") {
    SparseSymStore a(2, SymmetryKind::skew);
    FactorResult r = skew_ildl_factor(a, p);
    REQUIRE(r.diagnostics.static_pivots == 1);
    REQUIRE(r.diag_blocks.blocks()[0].a != 0.0);
  }
  SECTION("odd dimension is rejected") {
    SparseSymStore a(3, SymmetryKind::skew);
    REQUIRE_THROWS_AS(skew_ildl_factor(a, p), std::invalid_argument);
  }
}

TEST_CASE("skew partial pivot pairs with the first column maximum", "[factorization]") {
  FactorParams p = no_drop(PivotKind::bunch_kaufman);
  SECTION("single candidate") {
    SparseSymStore a = SparseSymStore::build(2, SymmetryKind::skew, {{1, 0, -2.0}});
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 2);
    REQUIRE(d.swaps.empty());
  }
  SECTION("argmax selection pairs rows (0,2)") {
    // column 0 = (0, 1, 5, 1)^T below the diagonal
    SparseSymStore a = SparseSymStore::build(
        4, SymmetryKind::skew, {{1, 0, 1.0}, {2, 0, 5.0}, {3, 0, 1.0}, {3, 2, 1.0}});
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.size == 2);
    REQUIRE(d.swaps == std::vector<std::pair<int, int>>{{1, 2}});
  }
  SECTION("zero first column takes the static path") {
    SparseSymStore a = SparseSymStore::build(4, SymmetryKind::skew, {{3, 2, 1.0}});
    CroutFactorizer f(a, p);
    PivotDecision d = f.decide_pivot();
    REQUIRE(d.static_pivot);
  }
}

TEST_CASE("apply_drop_rules", "[factorization]") {
  FactorParams p;
  const std::size_t unbounded = std::numeric_limits<std::size_t>::max();
  SECTION("no-drop configuration keeps everything") {
    p.drop_tol = 0.0;
    std::vector<std::pair<int, double>> col{{3, 0.5}, {5, 1e-12}, {9, -0.2}};
    ildl::apply_drop_rules(col, p, 1.0, unbounded);
    REQUIRE(col.size() == 3);
  }
  SECTION("threshold rule") {
    p.drop_tol = 1e-4;
    std::vector<std::pair<int, double>> col{{1, 0.5}, {2, 1e-6}, {3, 0.2}};
    ildl::apply_drop_rules(col, p, 1.0, unbounded);
    REQUIRE(col == std::vector<std::pair<int, double>>{{1, 0.5}, {3, 0.2}});
  }
  SECTION("cap keeps the largest magnitudes, ties to the lower row") {
    p.drop_tol = 0.0;
    std::vector<std::pair<int, double>> col;
    for (int i = 0; i < 10; ++i) col.push_back({i, (i % 5) + 1.0});
    ildl::apply_drop_rules(col, p, 1.0, 3);
    std::set<int> rows;
    for (auto& e : col) rows.insert(e.first);
    REQUIRE(rows == std::set<int>{4, 9, 3});  // two 5.0s then the first 4.0
  }
}

TEST_CASE("ildl_factor on worked examples", "[factorization]") {
  SECTION("identity factors trivially") {
    std::vector<Triplet> t;
    for (int i = 0; i < 4; ++i) t.push_back({i, i, 1.0});
    SparseSymStore a = SparseSymStore::build(4, SymmetryKind::symmetric, t);
    FactorResult r = ildl_factor(a, no_drop());
    REQUIRE(r.lower.nnz() == 0);
    REQUIRE(r.perm.is_identity());
    for (const auto& b : r.diag_blocks.blocks()) {
      REQUIRE(b.size == 1);
      REQUIRE(b.a == 1.0);
    }
  }
  SECTION("[[0,1],[1,0]] is a single 2x2 block") {
    SparseSymStore a = sym2x2(0.0, 1.0, 0.0);
    FactorResult r = ildl_factor(a, no_drop());
    REQUIRE(r.lower.nnz() == 0);
    REQUIRE(r.perm.is_identity());
    REQUIRE(r.diag_blocks.blocks().size() == 1);
    REQUIRE(r.diag_blocks.blocks()[0].b == 1.0);
  }
  SECTION("random 50x50 no-drop reconstruction") {
    SparseSymStore a = ildl::random_symmetric(50, 1234);
    for (PivotKind pk : {PivotKind::rook, PivotKind::bunch_kaufman}) {
      FactorResult r = ildl_factor(a, no_drop(pk));
      REQUIRE(ildl::testing::reconstruction_residual(a, r) <= 1e-12);
    }
  }
}

TEST_CASE("skew_ildl_factor", "[factorization]") {
  SECTION("2x2 block is the matrix itself") {
    SparseSymStore a = SparseSymStore::build(2, SymmetryKind::skew, {{1, 0, -2.0}});
    FactorResult r = skew_ildl_factor(a, no_drop());
    REQUIRE(r.lower.nnz() == 0);
    REQUIRE(r.diag_blocks.blocks().size() == 1);
    REQUIRE(r.diag_blocks.blocks()[0].a == 2.0);  // the (0,1) entry
  }
  SECTION("4x4 exact reconstruction") {
    SparseSymStore a = skew4x4();
    for (PivotKind pk : {PivotKind::rook, PivotKind::bunch_kaufman, PivotKind::none}) {
      FactorResult r = skew_ildl_factor(a, no_drop(pk));
      REQUIRE(ildl::testing::reconstruction_residual(a, r) <= 1e-12);
    }
  }
  SECTION("swap-and-scale multipliers equal the dense block inverse") {
    SparseSymStore a = skew4x4();
    FactorResult r = skew_ildl_factor(a, no_drop(PivotKind::none));
    const Eigen::MatrixXd ad = to_dense(a);
    const Eigen::MatrixXd expect = ad.block(2, 0, 2, 2) * ad.block(0, 0, 2, 2).inverse();
    const Eigen::MatrixXd ld = ildl::testing::dense_unit_lower(r.lower);
    REQUIRE((ld.block(2, 0, 2, 2) - expect).norm() <= 1e-14);
  }
  SECTION("random no-drop reconstruction") {
    SparseSymStore a = ildl::random_skew(40, 99);
    for (PivotKind pk : {PivotKind::rook, PivotKind::bunch_kaufman}) {
      FactorResult r = skew_ildl_factor(a, no_drop(pk));
      REQUIRE(ildl::testing::reconstruction_residual(a, r) <= 1e-12);
    }
  }
}

TEST_CASE("fill_of", "[factorization]") {
  SECTION("identity has fill one") {
    std::vector<Triplet> t;
    for (int i = 0; i < 5; ++i) t.push_back({i, i, 1.0});
    SparseSymStore a = SparseSymStore::build(5, SymmetryKind::symmetric, t);
    FactorResult r = ildl_factor(a, no_drop());
    REQUIRE(fill_of(r.lower, r.diag_blocks, a) == 1.0);
  }
  SECTION("complete factorization of a dense diagonally dominant 3x3") {
    SparseSymStore a = SparseSymStore::build(
        3, SymmetryKind::symmetric,
        {{0, 0, 5.0}, {1, 0, 1.0}, {2, 0, 1.0}, {1, 1, 5.0}, {2, 1, 1.0}, {2, 2, 5.0}});
    FactorResult r = ildl_factor(a, no_drop());
    // nnz(L+D+L^T) = 2*3 + 3 = 9 over nnz(A) = 9.
    REQUIRE(fill_of(r.lower, r.diag_blocks, a) == 1.0);
  }
  SECTION("fill stays below roughly twice the fill factor") {
    SparseSymStore a = ildl::random_symmetric(60, 7);
    FactorParams p;
    p.drop_tol = 0.0;
    p.fill_factor = 1.5;
    FactorResult r = ildl_factor(a, p);
    const double fill = fill_of(r.lower, r.diag_blocks, a);
    REQUIRE(fill <= 2.0 * p.fill_factor + 0.2);
  }
}

TEST_CASE("pivot acceptance audits", "[factorization]") {
  std::mt19937_64 seeds(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const unsigned seed = static_cast<unsigned>(seeds());
    FactorParams p = no_drop(trial % 2 ? PivotKind::bunch_kaufman : PivotKind::rook);
    p.record_pivot_audit = true;
    p.debug_audit = true;
    const bool skew = trial >= 4;
    SparseSymStore a = skew ? ildl::random_skew(30, seed) : ildl::random_symmetric(30, seed);
    FactorResult r = ildl_factor(a, p);
    REQUIRE(r.diagnostics.audit_violations == 0);
    REQUIRE_FALSE(r.diagnostics.pivot_audit.empty());
    for (const auto& e : r.diagnostics.pivot_audit) REQUIRE(e.ok);
    REQUIRE(ildl::testing::reconstruction_residual(a, r) <= 1e-12);
  }
}

TEST_CASE("skew factors keep the block structure", "[factorization]") {
  SparseSymStore a = ildl::random_skew(20, 5);
  FactorParams p;
  p.drop_tol = 1e-3;
  FactorResult r = skew_ildl_factor(a, p);
  for (const auto& b : r.diag_blocks.blocks()) {
    REQUIRE(b.size == 2);
    REQUIRE(b.a != 0.0);
    // L is strictly unit lower with an exact zero at (start+1, start).
    REQUIRE(r.lower.store().entry(b.start + 1, b.start) == 0.0);
  }
}

TEST_CASE("fill cap bounds every column of L", "[factorization]") {
  SparseSymStore a = ildl::random_symmetric(40, 17);
  FactorParams p;
  p.drop_tol = 0.0;
  p.fill_factor = 1.25;
  FactorResult r = ildl_factor(a, p);
  const std::size_t cap = ildl::column_cap(p.fill_factor, a.nnz_full(), a.n());
  for (int j = 0; j < a.n(); ++j) REQUIRE(r.lower.store().col_rows(j).size() <= cap);
}

TEST_CASE("reconstruction is exactly symmetric by construction", "[factorization]") {
  SparseSymStore a = ildl::random_symmetric(25, 31);
  FactorResult r = ildl_factor(a, no_drop());
  const std::vector<double> rec = ildl::reconstruct_dense(r.lower, r.diag_blocks);
  const int n = a.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) REQUIRE(rec[i * n + j] == rec[j * n + i]);

  SparseSymStore s = ildl::random_skew(24, 32);
  FactorResult rs = skew_ildl_factor(s, no_drop());
  const std::vector<double> recs = ildl::reconstruct_dense(rs.lower, rs.diag_blocks);
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 24; ++j) REQUIRE(recs[i * 24 + j] == -recs[j * 24 + i]);
}

TEST_CASE("shrinking drop_tol only adds entries", "[factorization]") {
  // Diagonally dominant banded matrix, no pivoting, so every run takes the
  // same pivot sequence and the kept patterns nest.
  const int n = 14;
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, 4.0});
  for (int i = 1; i < n; ++i) t.push_back({i, i - 1, -1.0});
  for (int i = 5; i < n; ++i) t.push_back({i, i - 5, 0.01});
  SparseSymStore a = SparseSymStore::build(n, SymmetryKind::symmetric, t);

  std::set<std::pair<int, int>> previous;
  bool first = true;
  for (double tol : {0.3, 0.1, 0.02, 1e-3, 0.0}) {
    FactorParams p = no_drop(PivotKind::none);
    p.drop_tol = tol;
    FactorResult r = ildl_factor(a, p);
    std::set<std::pair<int, int>> pattern;
    for (const Triplet& e : r.lower.store().to_triplets()) pattern.insert({e.row, e.col});
    if (!first)
      for (const auto& e : previous) REQUIRE(pattern.count(e) == 1);
    previous = pattern;
    first = false;
  }
}

TEST_CASE("static pivoting perturbs exactly zero symmetric columns", "[factorization]") {
  SparseSymStore a = SparseSymStore::build(
      3, SymmetryKind::symmetric, {{1, 1, 2.0}, {2, 1, 1.0}, {2, 2, 2.0}});
  FactorResult r = ildl_factor(a, no_drop());
  REQUIRE(r.diagnostics.static_pivots == 1);
  REQUIRE(r.diag_blocks.blocks()[0].a > 0.0);
}
