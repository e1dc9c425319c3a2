// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ildl/storage.hpp"

namespace ildl {

/// Parse failure carrying the 1-based line number of the offending input.
class io_error : public std::runtime_error {
 public:
  io_error(const std::string& msg, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  explicit io_error(const std::string& msg) : std::runtime_error(msg), line_(-1) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Reads a Matrix Market coordinate stream. Accepted headers are
/// `matrix coordinate real {symmetric|skew-symmetric}`, 1-based indices.
/// Entries above the diagonal are mirrored into the lower triangle (with a
/// sign flip for skew input); duplicates and nonzero skew diagonals are
/// errors, explicit zeros are dropped, and final columns are sorted.
inline SparseSymStore load_matrix_market(std::istream& in) {
  std::string line;
  int lineno = 0;

  if (!std::getline(in, line)) throw io_error("empty stream", 1);
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (detail::lower(banner) != "%%matrixmarket")
    throw io_error("not a MatrixMarket file (missing %%MatrixMarket banner)", lineno);
  if (detail::lower(object) != "matrix") throw io_error("unsupported object '" + object + "'", lineno);
  if (detail::lower(format) != "coordinate")
    throw io_error("unsupported format '" + format + "' (expected coordinate)", lineno);
  if (detail::lower(field) != "real")
    throw io_error("unsupported field '" + field + "' (expected real)", lineno);
  SymmetryKind kind;
  const std::string sym = detail::lower(symmetry);
  if (sym == "symmetric") {
    kind = SymmetryKind::symmetric;
  } else if (sym == "skew-symmetric") {
    kind = SymmetryKind::skew;
  } else {
    throw io_error("unsupported symmetry '" + symmetry + "' (expected symmetric or skew-symmetric)",
                   lineno);
  }

  long rows = -1, cols = -1, count = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    if (!(ls >> rows >> cols >> count)) throw io_error("malformed size line", lineno);
    break;
  }
  if (rows < 0) throw io_error("missing size line", lineno);
  if (rows != cols) throw io_error("matrix is not square", lineno);
  if (rows > static_cast<long>(1) << 30) throw io_error("dimension too large", lineno);
  const int n = static_cast<int>(rows);

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(count));
  long seen = 0;
  while (seen < count) {
    if (!std::getline(in, line)) throw io_error("unexpected end of file: expected " +
                                                std::to_string(count) + " entries, got " +
                                                std::to_string(seen), lineno + 1);
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    long i, j;
    double v;
    if (!(ls >> i >> j >> v)) throw io_error("malformed entry", lineno);
    if (i < 1 || i > n || j < 1 || j > n)
      throw io_error("index out of range [1," + std::to_string(n) + "]", lineno);
    if (kind == SymmetryKind::skew && i == j && v != 0.0)
      throw io_error("nonzero diagonal entry in skew-symmetric matrix", lineno);
    entries.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
    ++seen;
  }

  try {
    return SparseSymStore::build(n, kind, entries);
  } catch (const std::invalid_argument& e) {
    throw io_error(e.what());
  }
}

/// Writes the canonical lower-triangle coordinate form: 1-based, sorted by
/// column then row, values printed with 17 significant digits so that a
/// load -> write -> load round trip is bitwise exact.
inline void write_matrix_market(std::ostream& out, const SparseSymStore& a) {
  out << "%%MatrixMarket matrix coordinate real "
      << (a.kind() == SymmetryKind::skew ? "skew-symmetric" : "symmetric") << "\n";
  std::vector<Triplet> t = a.to_triplets();
  std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
    return x.col != y.col ? x.col < y.col : x.row < y.row;
  });
  out << a.n() << " " << a.n() << " " << t.size() << "\n";
  for (const Triplet& e : t)
    out << e.row + 1 << " " << e.col + 1 << " " << detail::format_double(e.value) << "\n";
}

/// Writes a unit lower triangular factor as a general coordinate matrix,
/// unit diagonal included.
inline void write_lower_general(std::ostream& out, const SparseSymStore& l) {
  std::vector<Triplet> t = l.to_triplets();
  for (int i = 0; i < l.n(); ++i) t.push_back({i, i, 1.0});
  std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
    return x.col != y.col ? x.col < y.col : x.row < y.row;
  });
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << l.n() << " " << l.n() << " " << t.size() << "\n";
  for (const Triplet& e : t)
    out << e.row + 1 << " " << e.col + 1 << " " << detail::format_double(e.value) << "\n";
}

inline void write_permutation(std::ostream& out, const Permutation& p) {
  for (int i = 0; i < p.size(); ++i) out << (i ? " " : "") << p.forward(i) + 1;
  out << "\n";
}

inline std::vector<double> read_vector(std::istream& in) {
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  return v;
}

}  // namespace ildl
