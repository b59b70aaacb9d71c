#pragma once

// Two-step per-slot scheduling. Step 1 picks one matching of the
// decomposition (M-TDMA round robin or M-EDF) and masks it by the TS matrix;
// step 2 runs iSLIP for best-effort VOQs over the ports step 1 left free, then
// pads so that the slot always carries N pairs.

#include <optional>
#include <type_traits>
#include <variant>
#include <vector>

#include "tsn/admission.hpp"
#include "tsn/core.hpp"
#include "tsn/edf.hpp"
#include "tsn/latin.hpp"

namespace tsn {

struct MtdmaMode {
  FlowDecompositionSet decomposition;
  friend bool operator==(const MtdmaMode&, const MtdmaMode&) = default;
};
struct MedfMode {
  Sc2Certificate certificate;
  friend bool operator==(const MedfMode&, const MedfMode&) = default;
};
using SchedulerMode = std::variant<MtdmaMode, MedfMode>;

inline const FlowDecompositionSet& decomposition_of(const SchedulerMode& mode) {
  return std::visit(
      [](const auto& m) -> const FlowDecompositionSet& {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, MtdmaMode>)
          return m.decomposition;
        else
          return m.certificate.decomposition;
      },
      mode);
}

inline const PerfectMatching& mtdma_matching(const FlowDecompositionSet& d, Slot t) {
  if (t < 0) throw ValidationError("slot must be non-negative");
  return d.matching(static_cast<std::size_t>(t % static_cast<Slot>(d.n())));
}

/// Matching scheduled by M-EDF at slot t, or nullopt when the virtual
/// processor idles. Replays EDF from slot 0; use Step1Selector in loops.
inline std::optional<PerfectMatching> medf_matching(const Sc2Certificate& cert, Slot t) {
  if (t < 0) throw ValidationError("slot must be non-negative");
  EdfDispatcher edf(cert.tvector);
  edf.skip(t);
  if (auto k = edf.next()) return cert.decomposition.matching(*k);
  return std::nullopt;
}

inline Matching mask_by_ts_matrix(const std::optional<PerfectMatching>& m,
                                  const BinaryMatrix& ts_live) {
  Matching r(ts_live.size());
  if (!m) return r;
  if (m->n() != ts_live.size()) throw ValidationError("matching and TS matrix differ in size");
  for (Port i = 0; i < m->n(); ++i)
    if (ts_live.at(i, m->output_of(i))) r.add(i, m->output_of(i));
  return r;
}

/// Step-1 choice for a slot: the 0-based label of the chosen matching, or
/// nullopt when nothing is scheduled.
struct Step1Choice {
  std::optional<std::size_t> label;
  const PerfectMatching* matching = nullptr;
};

/// Stateful step-1 selector for consecutive slots starting at `start`.
class Step1Selector {
public:
  explicit Step1Selector(SchedulerMode mode, Slot start = 0)
      : mode_(std::move(mode)), next_slot_(start) {
    if (auto* m = std::get_if<MedfMode>(&mode_)) {
      edf_.emplace(m->certificate.tvector);
      edf_->skip(start);
    }
  }

  const SchedulerMode& mode() const { return mode_; }
  bool is_medf() const { return edf_.has_value(); }

  Step1Choice select(Slot t) {
    if (t != next_slot_) throw std::logic_error("step-1 selector must be driven slot by slot");
    ++next_slot_;
    const FlowDecompositionSet& d = decomposition_of(mode_);
    if (!edf_) {
      const auto k = static_cast<std::size_t>(t % static_cast<Slot>(d.n()));
      return {k, &d.matching(k)};
    }
    if (auto k = edf_->next()) return {*k, &d.matching(*k)};
    return {};
  }

private:
  SchedulerMode mode_;
  std::optional<EdfDispatcher> edf_;
  Slot next_slot_;
};

/// Round-robin pointers, 0-based: grant_pointer per output, accept_pointer
/// per input.
struct IslipState {
  std::vector<Port> grant_pointer;
  std::vector<Port> accept_pointer;

  static IslipState initial(std::size_t n) { return {std::vector<Port>(n, 0), std::vector<Port>(n, 0)}; }
  friend bool operator==(const IslipState&, const IslipState&) = default;
};

struct IslipResult {
  Matching pairs;   // every step-2 pair, padding included
  Matching islip;   // only pairs matched by the request/grant/accept rounds
  IslipState state;
};

/// Lowest-index greedy padding of the ports left free by `busy` and `pairs`.
inline void pad_free_ports(Matching& pairs, const std::vector<bool>& busy_inputs,
                           const std::vector<bool>& busy_outputs) {
  const std::size_t n = busy_inputs.size();
  Port j = 0;
  for (Port i = 0; i < n; ++i) {
    if (busy_inputs[i] || pairs.input_busy(i)) continue;
    while (j < n && (busy_outputs[j] || pairs.output_busy(j))) ++j;
    if (j == n) break;
    pairs.add(i, j);
  }
}

inline IslipResult islip_select(const BinaryMatrix& voq_nonempty,
                                const std::vector<bool>& busy_inputs,
                                const std::vector<bool>& busy_outputs, IslipState state,
                                std::size_t iterations) {
  const std::size_t n = voq_nonempty.size();
  if (busy_inputs.size() != n || busy_outputs.size() != n || state.grant_pointer.size() != n ||
      state.accept_pointer.size() != n)
    throw ValidationError("iSLIP inputs differ in size");

  Matching m(n);
  auto in_free = [&](Port i) { return !busy_inputs[i] && !m.input_busy(i); };
  auto out_free = [&](Port j) { return !busy_outputs[j] && !m.output_busy(j); };

  std::vector<Port> granted_to(n);  // output -> input it granted, or kNone
  for (std::size_t it = 0; it < iterations; ++it) {
    // Request + grant: each free output grants the first requesting input at
    // or after its pointer.
    std::fill(granted_to.begin(), granted_to.end(), Matching::kNone);
    bool any_grant = false;
    for (Port j = 0; j < n; ++j) {
      if (!out_free(j)) continue;
      for (std::size_t step = 0; step < n; ++step) {
        const Port i = (state.grant_pointer[j] + step) % n;
        if (in_free(i) && voq_nonempty.at(i, j)) {
          granted_to[j] = i;
          any_grant = true;
          break;
        }
      }
    }
    if (!any_grant) break;

    // Accept: each input takes the first granting output at or after its pointer.
    std::vector<std::pair<Port, Port>> accepted;
    for (Port i = 0; i < n; ++i) {
      if (!in_free(i)) continue;
      for (std::size_t step = 0; step < n; ++step) {
        const Port j = (state.accept_pointer[i] + step) % n;
        if (granted_to[j] == i) {
          accepted.emplace_back(i, j);
          break;
        }
      }
    }
    for (auto [i, j] : accepted) {
      m.add(i, j);
      if (it == 0) {
        state.grant_pointer[j] = (i + 1) % n;
        state.accept_pointer[i] = (j + 1) % n;
      }
    }
  }

  IslipResult r{m, m, std::move(state)};
  pad_free_ports(r.pairs, busy_inputs, busy_outputs);
  return r;
}

}  // namespace tsn
