#pragma once

// Arbiter feasibility logic. SC1: every present flow has period >= N, which
// makes round-robin over any decomposition loss-free. SC2: a decomposition
// plus a T-vector such that each present flow in M_k either mirrors task k
// exactly (same period, zero offset) or has period >= 2*T_k - 1.

#include <optional>
#include <variant>
#include <vector>

#include "tsn/core.hpp"
#include "tsn/edf.hpp"
#include "tsn/latin.hpp"

namespace tsn {

struct Sc2Certificate {
  FlowDecompositionSet decomposition;
  TVector tvector;  // tvector.t[k] is the scheduling period of matching k
  friend bool operator==(const Sc2Certificate&, const Sc2Certificate&) = default;
};

inline bool check_sc1(const TrafficSpec& spec) {
  const auto n = static_cast<std::int64_t>(spec.n());
  for (const auto& [id, f] : spec.flows())
    if (f.period < n) return false;
  return true;
}

/// Whether a present flow is served loss-free by a matching scheduled with
/// period task_period under M-EDF.
inline bool flow_fits_task(const FlowParams& f, const Period& task_period) {
  if (task_period.is_infinite()) return false;
  const std::int64_t tk = task_period.value();
  return (f.period == tk && f.offset == 0) || (f.period >= 2 * tk - 1);
}

inline bool check_sc2_certificate(const TrafficSpec& spec, const Sc2Certificate& cert) {
  const std::size_t n = spec.n();
  if (cert.decomposition.n() != n || cert.tvector.n() != n)
    throw ValidationError("certificate dimension does not match the switch size");
  for (const auto& p : cert.tvector.t)
    if (p.is_finite() && p.value() < 1) return false;
  if (utilization(cert.tvector) > Rational(1)) return false;
  for (const auto& [id, f] : spec.flows()) {
    const std::size_t k = cert.decomposition.index_of(id.input, id.output);
    if (!flow_fits_task(f, cert.tvector.t[k])) return false;
  }
  return true;
}

namespace detail {

/// Largest task period compatible with every present flow in one matching,
/// given as the list of input->output pairs of that matching.
template <class PairRange>
Period candidate_period_for(const TrafficSpec& spec, const PairRange& pairs) {
  Period t1 = Period::infinite(), t2 = Period::infinite();
  for (auto [i, j] : pairs) {
    const auto f = spec.flow(i, j);
    if (!f) continue;
    if (f->offset == 0) t1 = std::min(t1, Period::finite(f->period));
    t2 = std::min(t2, Period::finite((f->period + 1) / 2));
  }
  if (t1.is_infinite()) return t2;
  for (auto [i, j] : pairs) {
    const auto f = spec.flow(i, j);
    if (f && !flow_fits_task(*f, t1)) return t2;
  }
  return t1;
}

}  // namespace detail

inline Period candidate_period(const TrafficSpec& spec, const PerfectMatching& m) {
  if (m.n() != spec.n()) throw ValidationError("matching dimension does not match the switch");
  return detail::candidate_period_for(spec, m.as_matching().pairs());
}

/// Brute-force SC2 search over all decompositions in canonical order.
/// Returns the first certificate whose T-vector has utilization <= 1.
inline std::optional<Sc2Certificate> search_sc2(const TrafficSpec& spec) {
  const std::size_t n = spec.n();
  if (n > kMaxEnumerableN)
    throw ValidationError("SC2 search supports n <= " + std::to_string(kMaxEnumerableN) +
                          ", got " + std::to_string(n));
  LatinSquareEnumerator squares(n);
  std::vector<std::vector<std::pair<Port, Port>>> groups(n);
  TVector tv;
  tv.t.resize(n);
  while (squares.advance()) {
    for (auto& g : groups) g.clear();
    for (Port i = 0; i < n; ++i)
      for (Port j = 0; j < n; ++j) groups[squares.at(i, j)].emplace_back(i, j);
    Rational u(0);
    bool over = false;
    for (std::size_t k = 0; k < n && !over; ++k) {
      tv.t[k] = detail::candidate_period_for(spec, groups[k]);
      if (tv.t[k].is_finite()) u += Rational(1, tv.t[k].value());
      over = u > Rational(1);
    }
    if (over) continue;
    Sc2Certificate cert{latin_to_decomposition(squares.current()), tv};
    if (!check_sc2_certificate(spec, cert))
      throw std::logic_error("SC2 search produced a certificate that fails verification");
    return cert;
  }
  return std::nullopt;
}

struct FlowRequest {
  Port input = 0;
  Port output = 0;
  std::int64_t offset = 0;
  std::int64_t period = 1;
};

struct AdmitSc1 {};
struct AdmitSc2 {
  Sc2Certificate certificate;
};
struct Reject {};
using AdmissionDecision = std::variant<AdmitSc1, AdmitSc2, Reject>;

class DuplicateSubscription : public ValidationError {
public:
  using ValidationError::ValidationError;
};

inline bool admitted(const AdmissionDecision& d) { return !std::holds_alternative<Reject>(d); }

/// Decides whether table + flow satisfies SC1 or SC2. On admission the flow
/// is added to the table; on rejection the table is unchanged.
inline AdmissionDecision arbiter_admit(TrafficSpec& table, const FlowRequest& flow) {
  if (flow.input >= table.n() || flow.output >= table.n())
    throw ValidationError("flow port outside the switch");
  if (table.present(flow.input, flow.output))
    throw DuplicateSubscription("flow (" + std::to_string(flow.input + 1) + "," +
                                std::to_string(flow.output + 1) + ") is already subscribed");
  TrafficSpec candidate = table;
  candidate.set_flow(flow.input, flow.output, {flow.offset, flow.period});
  if (check_sc1(candidate)) {
    table = std::move(candidate);
    return AdmitSc1{};
  }
  if (auto cert = search_sc2(candidate)) {
    table = std::move(candidate);
    return AdmitSc2{std::move(*cert)};
  }
  return Reject{};
}

}  // namespace tsn
