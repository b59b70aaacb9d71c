#pragma once

// Flow decomposition sets (N perfect matchings partitioning all N^2 flows)
// and their one-to-one correspondence with Latin squares whose first row is
// fixed to the natural order.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsn/core.hpp"

namespace tsn {

inline constexpr std::size_t kMaxEnumerableN = 6;
inline constexpr std::size_t kMaxCountableN = 7;

/// Latin square of order n whose first row is (0, 1, ..., n-1). Symbol k
/// names matching M_{k+1}.
class LatinSquare {
public:
  LatinSquare() = default;

  static LatinSquare from_rows(const std::vector<std::vector<std::size_t>>& rows) {
    const std::size_t n = rows.size();
    if (n < 2) throw ValidationError("Latin square order must be at least 2");
    LatinSquare l;
    l.n_ = n;
    l.cells_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw ValidationError("Latin square is not square");
      for (std::size_t j = 0; j < n; ++j) {
        if (rows[i][j] >= n)
          throw ValidationError("symbol out of range at (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ")");
        l.cells_[i * n + j] = static_cast<std::uint8_t>(rows[i][j]);
      }
    }
    l.validate();
    return l;
  }

  std::size_t n() const { return n_; }
  std::size_t at(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }

  std::vector<std::vector<std::size_t>> rows() const {
    std::vector<std::vector<std::size_t>> r(n_, std::vector<std::size_t>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r[i][j] = at(i, j);
    return r;
  }

  friend bool operator==(const LatinSquare&, const LatinSquare&) = default;
  friend auto operator<=>(const LatinSquare& a, const LatinSquare& b) {
    return a.cells_ <=> b.cells_;
  }

private:
  friend class LatinSquareEnumerator;

  void validate() const {
    for (std::size_t j = 0; j < n_; ++j)
      if (at(0, j) != j) throw ValidationError("first row must be the natural order");
    for (std::size_t k = 0; k < n_; ++k) {
      std::vector<bool> row_seen(n_, false), col_seen(n_, false);
      for (std::size_t x = 0; x < n_; ++x) {
        if (row_seen[at(k, x)])
          throw ValidationError("row " + std::to_string(k + 1) + " repeats a symbol");
        if (col_seen[at(x, k)])
          throw ValidationError("column " + std::to_string(k + 1) + " repeats a symbol");
        row_seen[at(k, x)] = true;
        col_seen[at(x, k)] = true;
      }
    }
  }

  std::size_t n_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// N perfect matchings summing to the all-one matrix, labeled so that
/// matchings()[k] contains flow (0, k).
class FlowDecompositionSet {
public:
  FlowDecompositionSet() = default;

  /// Accepts the matchings in any order and relabels them canonically.
  static FlowDecompositionSet from_matchings(const std::vector<PerfectMatching>& ms) {
    const std::size_t n = ms.size();
    if (n < 2) throw ValidationError("a decomposition set needs at least 2 matchings");
    std::vector<int> cover(n * n, 0);
    for (const auto& m : ms) {
      if (m.n() != n) throw ValidationError("matching dimension differs from set size");
      for (Port i = 0; i < n; ++i) ++cover[i * n + m.output_of(i)];
    }
    for (std::size_t idx = 0; idx < cover.size(); ++idx)
      if (cover[idx] != 1)
        throw ValidationError("matchings do not sum to the all-one matrix at (" +
                              std::to_string(idx / n + 1) + "," + std::to_string(idx % n + 1) +
                              ")");
    FlowDecompositionSet d;
    d.matchings_.resize(n);
    for (const auto& m : ms) d.matchings_[m.output_of(0)] = m;
    d.build_index();
    return d;
  }

  std::size_t n() const { return matchings_.size(); }
  const std::vector<PerfectMatching>& matchings() const { return matchings_; }
  const PerfectMatching& matching(std::size_t k) const { return matchings_[k]; }

  /// Index k of the matching that contains flow (i, j).
  std::size_t index_of(Port i, Port j) const { return index_[i * n() + j]; }

  friend bool operator==(const FlowDecompositionSet& a, const FlowDecompositionSet& b) {
    return a.matchings_ == b.matchings_;
  }

private:
  friend FlowDecompositionSet latin_to_decomposition(const LatinSquare&);

  void build_index() {
    const std::size_t n = matchings_.size();
    index_.assign(n * n, 0);
    for (std::size_t k = 0; k < n; ++k)
      for (Port i = 0; i < n; ++i) index_[i * n + matchings_[k].output_of(i)] = k;
  }

  std::vector<PerfectMatching> matchings_;
  std::vector<std::size_t> index_;
};

inline LatinSquare decomposition_to_latin(const FlowDecompositionSet& d) {
  const std::size_t n = d.n();
  std::vector<std::vector<std::size_t>> rows(n, std::vector<std::size_t>(n));
  for (std::size_t k = 0; k < n; ++k)
    for (Port i = 0; i < n; ++i) rows[i][d.matching(k).output_of(i)] = k;
  return LatinSquare::from_rows(rows);
}

inline FlowDecompositionSet latin_to_decomposition(const LatinSquare& l) {
  const std::size_t n = l.n();
  std::vector<std::vector<Port>> perms(n, std::vector<Port>(n));
  for (Port i = 0; i < n; ++i)
    for (Port j = 0; j < n; ++j) perms[l.at(i, j)][i] = j;
  FlowDecompositionSet d;
  d.matchings_.reserve(n);
  for (auto& p : perms) d.matchings_.push_back(PerfectMatching::from_permutation(std::move(p)));
  d.build_index();
  return d;
}

/// M_k contains (i, j) iff j - i = k (mod n).
inline FlowDecompositionSet cyclic_decomposition(std::size_t n) {
  if (n < 2) throw ValidationError("switch size must be at least 2");
  std::vector<std::vector<std::size_t>> rows(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = (j + n - i) % n;
  return latin_to_decomposition(LatinSquare::from_rows(rows));
}

/// Streams every Latin square of order n with natural first row, in
/// lexicographic order of the row-major cell sequence. Row-by-row
/// backtracking; holds a single partial square at a time.
class LatinSquareEnumerator {
public:
  explicit LatinSquareEnumerator(std::size_t n) : n_(n) {
    if (n < 2 || n > kMaxEnumerableN)
      throw ValidationError("enumeration supports 2 <= n <= " + std::to_string(kMaxEnumerableN) +
                            ", got " + std::to_string(n));
    grid_.assign(n * n, kEmpty);
    row_used_.assign(n, 0);
    col_used_.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) place(j, static_cast<std::uint8_t>(j));
  }

  /// Moves to the next square. Returns false once the sequence is exhausted.
  bool advance() {
    if (done_) return false;
    const std::size_t total = n_ * n_;
    std::size_t pos;
    unsigned start;
    if (!started_) {
      started_ = true;
      pos = n_;
      start = 0;
    } else {
      pos = total - 1;
      start = grid_[pos] + 1u;
      unplace(pos);
    }
    for (;;) {
      const std::size_t r = pos / n_, c = pos % n_;
      const unsigned blocked = row_used_[r] | col_used_[c];
      bool placed = false;
      for (unsigned s = start; s < n_; ++s) {
        if (!(blocked & (1u << s))) {
          place(pos, static_cast<std::uint8_t>(s));
          placed = true;
          break;
        }
      }
      if (placed) {
        if (++pos == total) return true;
        start = 0;
        continue;
      }
      if (pos == n_) {
        done_ = true;
        return false;
      }
      --pos;
      start = grid_[pos] + 1u;
      unplace(pos);
    }
  }

  /// Valid after a successful advance().
  LatinSquare current() const {
    LatinSquare l;
    l.n_ = n_;
    l.cells_ = grid_;
    return l;
  }

  /// Raw symbol of cell (i, j) of the current square; avoids a copy.
  std::size_t at(std::size_t i, std::size_t j) const { return grid_[i * n_ + j]; }
  std::size_t n() const { return n_; }

private:
  static constexpr std::uint8_t kEmpty = 0xff;

  void place(std::size_t pos, std::uint8_t s) {
    grid_[pos] = s;
    row_used_[pos / n_] |= 1u << s;
    col_used_[pos % n_] |= 1u << s;
  }
  void unplace(std::size_t pos) {
    const std::uint8_t s = grid_[pos];
    row_used_[pos / n_] &= ~(1u << s);
    col_used_[pos % n_] &= ~(1u << s);
    grid_[pos] = kEmpty;
  }

  std::size_t n_;
  std::vector<std::uint8_t> grid_;
  std::vector<unsigned> row_used_, col_used_;
  bool started_ = false;
  bool done_ = false;
};

/// Streaming view over every flow decomposition set of an n x n switch.
class DecompositionEnumerator {
public:
  explicit DecompositionEnumerator(std::size_t n) : squares_(n) {}

  std::optional<FlowDecompositionSet> next() {
    if (!squares_.advance()) return std::nullopt;
    return latin_to_decomposition(squares_.current());
  }

private:
  LatinSquareEnumerator squares_;
};

inline DecompositionEnumerator enumerate_decompositions(std::size_t n) {
  return DecompositionEnumerator(n);
}

/// Number of flow decomposition sets: (n-1)! times the number of reduced
/// Latin squares of order n.
inline std::uint64_t count_decompositions(std::size_t n) {
  // Reduced Latin squares of order 1..7 (OEIS A000315).
  static constexpr std::array<std::uint64_t, 8> kReduced = {0, 1, 1, 1, 4, 56, 9408, 16942080};
  if (n < 2 || n > kMaxCountableN)
    throw ValidationError("counting supports 2 <= n <= " + std::to_string(kMaxCountableN) +
                          ", got " + std::to_string(n));
  std::uint64_t fact = 1;
  for (std::uint64_t k = 2; k < n; ++k) fact *= k;
  return fact * kReduced[n];
}

}  // namespace tsn
