#pragma once

// Domain types shared by the whole switch model: ports, slots, extended
// (possibly infinite) periods and offsets, binary matrices, matchings and
// TS cells. Ports are 0-based internally; every external format is 1-based.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tsn {

using Port = std::size_t;
using Slot = std::int64_t;

class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Integer slot quantity that may be infinite. Infinity is a distinct state,
/// never an encoded large number.
template <class Tag>
class Extended {
public:
  constexpr Extended() = default;  // infinite
  static constexpr Extended infinite() { return Extended{}; }
  static constexpr Extended finite(std::int64_t v) {
    Extended e;
    e.value_ = v;
    return e;
  }

  constexpr bool is_finite() const { return value_.has_value(); }
  constexpr bool is_infinite() const { return !value_.has_value(); }

  std::int64_t value() const {
    if (!value_) throw std::logic_error("value() on an infinite quantity");
    return *value_;
  }

  friend constexpr bool operator==(const Extended&, const Extended&) = default;

  // Finite values order normally; infinity is above every finite value.
  friend constexpr std::strong_ordering operator<=>(const Extended& a, const Extended& b) {
    if (a.is_infinite() || b.is_infinite())
      return a.is_infinite() <=> b.is_infinite();
    return *a.value_ <=> *b.value_;
  }

  std::string to_string() const { return value_ ? std::to_string(*value_) : "inf"; }

private:
  std::optional<std::int64_t> value_;
};

struct PeriodTag {};
struct OffsetTag {};
using Period = Extended<PeriodTag>;
using Offset = Extended<OffsetTag>;

/// Square 0/1 matrix. Accepts arbitrary integer input in from_rows and rejects
/// anything non-square or non-binary.
class BinaryMatrix {
public:
  BinaryMatrix() = default;
  explicit BinaryMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  static BinaryMatrix from_rows(const std::vector<std::vector<int>>& rows) {
    const std::size_t n = rows.size();
    BinaryMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n)
        throw ValidationError("matrix is not square: row " + std::to_string(i + 1) + " has " +
                              std::to_string(rows[i].size()) + " entries, expected " +
                              std::to_string(n));
      for (std::size_t j = 0; j < n; ++j) {
        const int v = rows[i][j];
        if (v != 0 && v != 1)
          throw ValidationError("matrix entry (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ") is not binary");
        m.set(i, j, v == 1);
      }
    }
    return m;
  }

  static BinaryMatrix ones(std::size_t n) {
    BinaryMatrix m(n);
    std::fill(m.bits_.begin(), m.bits_.end(), std::uint8_t{1});
    return m;
  }

  std::size_t size() const { return n_; }
  bool at(Port i, Port j) const { return bits_[i * n_ + j] != 0; }
  void set(Port i, Port j, bool v = true) { bits_[i * n_ + j] = v ? 1 : 0; }

  std::size_t row_sum(Port i) const {
    return static_cast<std::size_t>(
        std::count(bits_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                   bits_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_), std::uint8_t{1}));
  }
  std::size_t col_sum(Port j) const {
    std::size_t s = 0;
    for (Port i = 0; i < n_; ++i) s += bits_[i * n_ + j];
    return s;
  }

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

inline bool is_matching(const BinaryMatrix& m) {
  for (Port k = 0; k < m.size(); ++k)
    if (m.row_sum(k) > 1 || m.col_sum(k) > 1) return false;
  return true;
}

inline bool is_perfect_matching(const BinaryMatrix& m) {
  for (Port k = 0; k < m.size(); ++k)
    if (m.row_sum(k) != 1 || m.col_sum(k) != 1) return false;
  return true;
}

/// Crossbar configuration: each input sends to at most one output and each
/// output receives from at most one input.
class Matching {
public:
  static constexpr Port kNone = std::numeric_limits<Port>::max();

  Matching() = default;
  explicit Matching(std::size_t n) : out_of_in_(n, kNone), in_of_out_(n, kNone) {}

  static Matching from_matrix(const BinaryMatrix& m) {
    if (!is_matching(m)) throw ValidationError("matrix violates the crossbar constraint");
    Matching r(m.size());
    for (Port i = 0; i < m.size(); ++i)
      for (Port j = 0; j < m.size(); ++j)
        if (m.at(i, j)) r.add(i, j);
    return r;
  }

  std::size_t n() const { return out_of_in_.size(); }

  void add(Port i, Port j) {
    if (i >= n() || j >= n()) throw ValidationError("port out of range");
    if (out_of_in_[i] != kNone || in_of_out_[j] != kNone)
      throw ValidationError("pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            ") conflicts with the crossbar constraint");
    out_of_in_[i] = j;
    in_of_out_[j] = i;
  }

  bool contains(Port i, Port j) const { return out_of_in_[i] == j; }
  bool input_busy(Port i) const { return out_of_in_[i] != kNone; }
  bool output_busy(Port j) const { return in_of_out_[j] != kNone; }
  Port output_of(Port i) const { return out_of_in_[i]; }
  Port input_of(Port j) const { return in_of_out_[j]; }

  std::size_t size() const {
    return static_cast<std::size_t>(
        std::count_if(out_of_in_.begin(), out_of_in_.end(), [](Port p) { return p != kNone; }));
  }

  /// (input, output) pairs ordered by input.
  std::vector<std::pair<Port, Port>> pairs() const {
    std::vector<std::pair<Port, Port>> r;
    for (Port i = 0; i < n(); ++i)
      if (out_of_in_[i] != kNone) r.emplace_back(i, out_of_in_[i]);
    return r;
  }

  BinaryMatrix to_matrix() const {
    BinaryMatrix m(n());
    for (auto [i, j] : pairs()) m.set(i, j);
    return m;
  }

  friend bool operator==(const Matching&, const Matching&) = default;

private:
  std::vector<Port> out_of_in_;
  std::vector<Port> in_of_out_;
};

/// A matching that uses all N ports, stored as the permutation input -> output.
class PerfectMatching {
public:
  PerfectMatching() = default;

  static PerfectMatching from_permutation(std::vector<Port> output_of_input) {
    const std::size_t n = output_of_input.size();
    std::vector<bool> seen(n, false);
    for (Port j : output_of_input) {
      if (j >= n || seen[j]) throw ValidationError("not a permutation of the output ports");
      seen[j] = true;
    }
    PerfectMatching p;
    p.perm_ = std::move(output_of_input);
    return p;
  }

  static PerfectMatching from_matrix(const BinaryMatrix& m) {
    if (!is_perfect_matching(m)) throw ValidationError("matrix is not a perfect matching");
    std::vector<Port> perm(m.size());
    for (Port i = 0; i < m.size(); ++i)
      for (Port j = 0; j < m.size(); ++j)
        if (m.at(i, j)) perm[i] = j;
    return from_permutation(std::move(perm));
  }

  static PerfectMatching identity(std::size_t n) {
    std::vector<Port> perm(n);
    std::iota(perm.begin(), perm.end(), Port{0});
    return from_permutation(std::move(perm));
  }

  std::size_t n() const { return perm_.size(); }
  Port output_of(Port i) const { return perm_[i]; }
  bool contains(Port i, Port j) const { return perm_[i] == j; }
  const std::vector<Port>& permutation() const { return perm_; }

  Matching as_matching() const {
    Matching m(n());
    for (Port i = 0; i < n(); ++i) m.add(i, perm_[i]);
    return m;
  }
  BinaryMatrix to_matrix() const { return as_matching().to_matrix(); }

  friend bool operator==(const PerfectMatching&, const PerfectMatching&) = default;

private:
  std::vector<Port> perm_;
};

/// Parameters of a present TS flow.
struct FlowParams {
  std::int64_t offset = 0;
  std::int64_t period = 1;
  friend bool operator==(const FlowParams&, const FlowParams&) = default;
};

struct FlowId {
  Port input = 0;
  Port output = 0;
  friend auto operator<=>(const FlowId&, const FlowId&) = default;
};

/// Offset and period matrices for all N^2 potential TS flows. An absent flow
/// has infinite offset and infinite period.
class TrafficSpec {
public:
  TrafficSpec() = default;
  explicit TrafficSpec(std::size_t n) : n_(n), offset_(n * n), period_(n * n) {
    if (n < 2) throw ValidationError("switch size must be at least 2, got " + std::to_string(n));
  }

  static TrafficSpec from_matrices(const std::vector<std::vector<Offset>>& offsets,
                                   const std::vector<std::vector<Period>>& periods) {
    const std::size_t n = offsets.size();
    if (periods.size() != n) throw ValidationError("offset and period matrices differ in size");
    TrafficSpec s(n);
    for (Port i = 0; i < n; ++i) {
      if (offsets[i].size() != n || periods[i].size() != n)
        throw ValidationError("offset/period matrix is not square");
      for (Port j = 0; j < n; ++j) s.set(i, j, offsets[i][j], periods[i][j]);
    }
    return s;
  }

  std::size_t n() const { return n_; }
  Offset offset(Port i, Port j) const { return offset_[i * n_ + j]; }
  Period period(Port i, Port j) const { return period_[i * n_ + j]; }
  bool present(Port i, Port j) const { return period(i, j).is_finite(); }

  std::optional<FlowParams> flow(Port i, Port j) const {
    if (!present(i, j)) return std::nullopt;
    return FlowParams{offset(i, j).value(), period(i, j).value()};
  }

  void set(Port i, Port j, Offset off, Period per) {
    check_port(i);
    check_port(j);
    if (off.is_infinite() != per.is_infinite())
      throw ValidationError("flow (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            "): offset is infinite iff period is infinite");
    if (off.is_finite() && off.value() < 0)
      throw ValidationError("flow (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            "): offset must be non-negative");
    if (per.is_finite() && per.value() < 1)
      throw ValidationError("flow (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                            "): period must be at least 1");
    offset_[i * n_ + j] = off;
    period_[i * n_ + j] = per;
  }

  void set_flow(Port i, Port j, FlowParams p) {
    set(i, j, Offset::finite(p.offset), Period::finite(p.period));
  }
  void clear(Port i, Port j) { set(i, j, Offset::infinite(), Period::infinite()); }

  /// Present flows in row-major order.
  std::vector<std::pair<FlowId, FlowParams>> flows() const {
    std::vector<std::pair<FlowId, FlowParams>> r;
    for (Port i = 0; i < n_; ++i)
      for (Port j = 0; j < n_; ++j)
        if (auto f = flow(i, j)) r.emplace_back(FlowId{i, j}, *f);
    return r;
  }

  friend bool operator==(const TrafficSpec&, const TrafficSpec&) = default;

private:
  void check_port(Port p) const {
    if (p >= n_)
      throw ValidationError("port " + std::to_string(p + 1) + " outside [1," + std::to_string(n_) +
                            "]");
  }

  std::size_t n_ = 0;
  std::vector<Offset> offset_;
  std::vector<Period> period_;
};

enum class CellKind { TS, BE };

struct Cell {
  Port input = 0;
  Port output = 0;
  Slot arrival_slot = 0;
  std::optional<Slot> deadline_slot;  // inclusive; nullopt for BE (never expires)
  CellKind kind = CellKind::TS;
  std::int64_t seq = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Lifetime {
  Slot arrival = 0;
  Slot deadline = 0;  // inclusive last schedulable slot
  friend bool operator==(const Lifetime&, const Lifetime&) = default;
};

inline Lifetime cell_lifetime(const TrafficSpec& spec, Port i, Port j, std::int64_t s) {
  const auto f = spec.flow(i, j);
  if (!f)
    throw ValidationError("flow (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                          ") is absent");
  if (s < 0) throw ValidationError("sequence number must be non-negative");
  return {f->offset + s * f->period, f->offset + (s + 1) * f->period - 1};
}

inline Cell make_ts_cell(const TrafficSpec& spec, Port i, Port j, std::int64_t s) {
  const Lifetime lt = cell_lifetime(spec, i, j, s);
  return Cell{i, j, lt.arrival, lt.deadline, CellKind::TS, s};
}

/// Ceiling division that is correct for negative numerators.
inline std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num > 0) == (den > 0))) ++q;
  return q;
}

}  // namespace tsn
