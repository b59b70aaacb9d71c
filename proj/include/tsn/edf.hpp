#pragma once

// Virtual single-processor periodic task system driven by EDF. Task k
// releases a unit request at every multiple of t[k] starting at slot 0; the
// request must be served before the next release.

#include <boost/rational.hpp>

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tsn/core.hpp"

namespace tsn {

using Rational = boost::rational<std::int64_t>;

class InfeasibleUtilization : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Per-matching scheduling periods. An infinite entry is a task that never
/// releases a request.
struct TVector {
  std::vector<Period> t;

  std::size_t n() const { return t.size(); }
  friend bool operator==(const TVector&, const TVector&) = default;

  static TVector of(std::initializer_list<std::int64_t> finite_periods) {
    TVector v;
    for (auto p : finite_periods) v.t.push_back(Period::finite(p));
    return v;
  }
};

inline Rational utilization(const TVector& tv) {
  Rational u(0);
  for (const auto& p : tv.t)
    if (p.is_finite()) u += Rational(1, p.value());
  return u;
}

/// lcm of the finite periods; 1 when there are none.
inline std::int64_t hyperperiod(const TVector& tv) {
  std::int64_t h = 1;
  for (const auto& p : tv.t)
    if (p.is_finite()) h = std::lcm(h, p.value());
  return h;
}

struct EdfTrace {
  /// a[t] is the 0-based task served at slot t, or nullopt for an idle slot.
  std::vector<std::optional<std::size_t>> a;

  Slot horizon() const { return static_cast<Slot>(a.size()); }
  friend bool operator==(const EdfTrace&, const EdfTrace&) = default;
};

/// Slot-by-slot EDF dispatcher. Ties on deadline go to the lowest task index.
class EdfDispatcher {
public:
  explicit EdfDispatcher(TVector tv) : tv_(std::move(tv)), pending_(tv_.n(), false) {
    for (const auto& p : tv_.t)
      if (p.is_finite() && p.value() < 1)
        throw ValidationError("T-vector periods must be positive");
    if (utilization(tv_) > Rational(1))
      throw InfeasibleUtilization("T-vector utilization exceeds 1");
  }

  const TVector& tvector() const { return tv_; }
  Slot now() const { return now_; }
  std::uint64_t misses() const { return misses_; }

  /// Serves slot now() and advances to the next slot.
  std::optional<std::size_t> next() {
    const std::size_t n = tv_.n();
    for (std::size_t k = 0; k < n; ++k) {
      if (tv_.t[k].is_infinite() || now_ % tv_.t[k].value() != 0) continue;
      if (pending_[k]) ++misses_;
      pending_[k] = true;
    }
    std::optional<std::size_t> pick;
    Slot best = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!pending_[k]) continue;
      const std::int64_t period = tv_.t[k].value();
      const Slot deadline = (now_ / period + 1) * period - 1;
      if (!pick || deadline < best) {
        pick = k;
        best = deadline;
      }
    }
    if (pick) pending_[*pick] = false;
    ++now_;
    return pick;
  }

  /// Runs the dispatcher forward without recording, e.g. to resume mid-stream.
  void skip(Slot slots) {
    for (Slot s = 0; s < slots; ++s) next();
  }

private:
  TVector tv_;
  std::vector<bool> pending_;
  Slot now_ = 0;
  std::uint64_t misses_ = 0;
};

inline EdfTrace edf_trace(const TVector& tv, Slot horizon) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1 slot");
  EdfDispatcher d(tv);
  EdfTrace tr;
  tr.a.reserve(static_cast<std::size_t>(horizon));
  for (Slot t = 0; t < horizon; ++t) tr.a.push_back(d.next());
  return tr;
}

/// Replays the request pattern of tv against a trace: every request window
/// that ends inside the horizon must hold exactly one service of its task,
/// truncated windows at most one, and no slot may serve a task without a
/// live request.
inline bool verify_no_deadline_miss(const TVector& tv, const EdfTrace& trace) {
  const Slot h = trace.horizon();
  for (const auto& a : trace.a)
    if (a && (*a >= tv.n() || tv.t[*a].is_infinite())) return false;
  for (std::size_t k = 0; k < tv.n(); ++k) {
    if (tv.t[k].is_infinite()) continue;
    const std::int64_t p = tv.t[k].value();
    for (Slot start = 0; start < h; start += p) {
      const Slot end = std::min(start + p, h);
      int served = 0;
      for (Slot t = start; t < end; ++t)
        if (trace.a[static_cast<std::size_t>(t)] == k) ++served;
      const bool complete = start + p <= h;
      if (complete ? served != 1 : served > 1) return false;
    }
  }
  return true;
}

}  // namespace tsn
