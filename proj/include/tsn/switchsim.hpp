#pragma once

// Slot-level model of the N x N input-queued TSN switch: metadata table,
// one-cell-per-flow TS matrix, best-effort VOQs, arbiter, two-step scheduler
// and crossbar. One Switch instance is single-threaded.

#include <deque>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tsn/admission.hpp"
#include "tsn/core.hpp"
#include "tsn/latin.hpp"
#include "tsn/scenario.hpp"
#include "tsn/scheduler.hpp"

namespace tsn {

struct TsTransfer {
  Port input = 0;
  Port output = 0;
  std::int64_t seq = 0;
  Slot arrival = 0;
};

struct BeTransfer {
  Port input = 0;
  Port output = 0;
  Slot arrival = 0;
  std::uint64_t seq = 0;  // per-VOQ arrival order
};

/// Everything that happened in one slot.
struct SlotRecord {
  Slot slot = 0;
  bool medf = false;
  std::optional<std::size_t> step1_label;  // 0-based matching index
  Matching ts_pairs;                       // step-1 matching masked by the TS matrix
  Matching be_pairs;                       // step-2 pairs, padding included
  std::vector<TsTransfer> ts_sent;
  std::vector<BeTransfer> be_sent;
  std::vector<FlowId> expired;
};

struct FlowCounters {
  std::int64_t arrivals = 0;
  std::int64_t delivered = 0;
  std::int64_t expired = 0;
  std::int64_t max_delay = 0;
  std::int64_t delay_sum = 0;

  double mean_delay() const {
    return delivered ? static_cast<double>(delay_sum) / static_cast<double>(delivered) : 0.0;
  }
};

struct VoqCounters {
  std::int64_t arrivals = 0;
  std::int64_t delivered = 0;
  std::int64_t drops = 0;
};

struct MetricsAccumulator {
  std::size_t n = 0;
  std::vector<FlowCounters> ts;  // row-major by (input, output)
  std::vector<VoqCounters> voq;
  std::map<std::int64_t, std::int64_t> ts_delay_histogram;
  std::int64_t backlog_sum = 0;  // sum over slots of total VOQ occupancy
  std::int64_t backlog_samples = 0;

  explicit MetricsAccumulator(std::size_t n_ = 0) : n(n_), ts(n_ * n_), voq(n_ * n_) {}

  FlowCounters& flow(Port i, Port j) { return ts[i * n + j]; }
  const FlowCounters& flow(Port i, Port j) const { return ts[i * n + j]; }
  VoqCounters& queue(Port i, Port j) { return voq[i * n + j]; }
  const VoqCounters& queue(Port i, Port j) const { return voq[i * n + j]; }

  std::int64_t ts_expired_total() const {
    std::int64_t s = 0;
    for (const auto& f : ts) s += f.expired;
    return s;
  }
  double mean_backlog() const {
    return backlog_samples ? static_cast<double>(backlog_sum) / static_cast<double>(backlog_samples)
                           : 0.0;
  }
};

struct SwitchConfig {
  std::size_t voq_capacity = 64;
  std::optional<std::size_t> islip_iterations;  // nullopt = n
};

class Switch {
public:
  Switch(TrafficSpec metadata, SchedulerMode mode, SwitchConfig cfg = {})
      : n_(metadata.n()),
        cfg_(cfg),
        metadata_(std::move(metadata)),
        selector_(std::move(mode), 0),
        ts_live_(n_),
        ts_cells_(n_ * n_),
        voqs_(n_ * n_),
        voq_seq_(n_ * n_, 0),
        islip_(IslipState::initial(n_)),
        metrics_(n_),
        busy_in_(n_),
        busy_out_(n_) {
    if (decomposition_of(selector_.mode()).n() != n_)
      throw ValidationError("scheduler decomposition does not match the switch size");
    for (const auto& [id, f] : metadata_.flows()) schedule_arrivals(id, f);
  }

  std::size_t n() const { return n_; }
  Slot slot() const { return slot_; }
  const TrafficSpec& metadata() const { return metadata_; }
  const SchedulerMode& mode() const { return selector_.mode(); }
  const BinaryMatrix& ts_matrix() const { return ts_live_; }
  const std::optional<Cell>& ts_cell(Port i, Port j) const { return ts_cells_[i * n_ + j]; }
  std::size_t voq_length(Port i, Port j) const { return voqs_[i * n_ + j].size(); }
  const MetricsAccumulator& metrics() const { return metrics_; }

  std::int64_t live_ts_cells() const {
    std::int64_t c = 0;
    for (const auto& x : ts_cells_) c += x.has_value();
    return c;
  }

  /// Adds a subscribed flow from the current slot on and swaps in the
  /// scheduler mode the arbiter chose for the extended table.
  void subscribe(const FlowRequest& f, SchedulerMode mode) {
    if (metadata_.present(f.input, f.output))
      throw DuplicateSubscription("flow already present in the metadata table");
    metadata_.set_flow(f.input, f.output, {f.offset, f.period});
    schedule_arrivals({f.input, f.output}, {f.offset, f.period});
    selector_ = Step1Selector(std::move(mode), slot_);
  }

  /// Advances one slot. be_arrivals holds the (input, output) of every BE
  /// cell arriving in this slot.
  SlotRecord step(std::span<const std::pair<Port, Port>> be_arrivals) {
    SlotRecord rec;
    rec.slot = slot_;

    // (1) TS arrivals go straight into the TS matrix.
    for (auto& a : arrivals_) {
      if (a.next_arrival != slot_) continue;
      auto& cell = ts_cells_[a.id.input * n_ + a.id.output];
      if (cell) throw std::logic_error("TS cell still live when its successor arrives");
      cell = Cell{a.id.input, a.id.output, slot_, slot_ + a.period - 1, CellKind::TS, a.next_seq};
      ts_live_.set(a.id.input, a.id.output);
      ++metrics_.flow(a.id.input, a.id.output).arrivals;
      ++a.next_seq;
      a.next_arrival += a.period;
    }

    // (2) BE arrivals: enqueue or drop on overflow.
    for (auto [i, j] : be_arrivals) {
      if (i >= n_ || j >= n_)
        throw ScenarioError("BE arrival addressed to a port outside [1," + std::to_string(n_) + "]");
      auto& q = voqs_[i * n_ + j];
      auto& c = metrics_.queue(i, j);
      ++c.arrivals;
      if (q.size() >= cfg_.voq_capacity) {
        ++c.drops;
        continue;
      }
      q.push_back({slot_, voq_seq_[i * n_ + j]++});
      ++be_backlog_;
    }

    // (3) Step 1: chosen matching masked by live TS cells.
    const Step1Choice choice = selector_.select(slot_);
    rec.medf = selector_.is_medf();
    rec.step1_label = choice.label;
    rec.ts_pairs = Matching(n_);
    if (choice.matching)
      for (Port i = 0; i < n_; ++i) {
        const Port j = choice.matching->output_of(i);
        if (ts_live_.at(i, j)) rec.ts_pairs.add(i, j);
      }

    // (4) Step 2: iSLIP over the ports step 1 left free, then padding.
    auto& busy_in = busy_in_;
    auto& busy_out = busy_out_;
    for (Port i = 0; i < n_; ++i) {
      busy_in[i] = rec.ts_pairs.input_busy(i);
      busy_out[i] = rec.ts_pairs.output_busy(i);
    }
    if (be_backlog_ == 0) {
      // No requests: iSLIP would grant nothing and leave its pointers alone.
      rec.be_pairs = Matching(n_);
      pad_free_ports(rec.be_pairs, busy_in, busy_out);
    } else {
      BinaryMatrix nonempty(n_);
      for (Port i = 0; i < n_; ++i)
        for (Port j = 0; j < n_; ++j) nonempty.set(i, j, !voqs_[i * n_ + j].empty());
      IslipResult be = islip_select(nonempty, busy_in, busy_out, std::move(islip_),
                                    cfg_.islip_iterations.value_or(n_));
      islip_ = std::move(be.state);
      rec.be_pairs = std::move(be.pairs);
    }

    // (5) Crossbar transfer.
    for (Port i = 0; i < n_; ++i) {
      if (!rec.ts_pairs.input_busy(i)) continue;
      const Port j = rec.ts_pairs.output_of(i);
      auto& cell = ts_cells_[i * n_ + j];
      const Slot delay = slot_ - cell->arrival_slot;
      auto& fc = metrics_.flow(i, j);
      ++fc.delivered;
      fc.delay_sum += delay;
      fc.max_delay = std::max(fc.max_delay, delay);
      ++metrics_.ts_delay_histogram[delay];
      rec.ts_sent.push_back({i, j, cell->seq, cell->arrival_slot});
      cell.reset();
      ts_live_.set(i, j, false);
    }
    for (Port i = 0; i < n_ && be_backlog_ > 0; ++i) {
      if (!rec.be_pairs.input_busy(i)) continue;
      const Port j = rec.be_pairs.output_of(i);
      auto& q = voqs_[i * n_ + j];
      if (q.empty()) continue;
      rec.be_sent.push_back({i, j, q.front().arrival, q.front().seq});
      q.pop_front();
      --be_backlog_;
      ++metrics_.queue(i, j).delivered;
    }

    // (6) Expiry sweep: a cell whose last schedulable slot was this one is lost.
    for (Port i = 0; i < n_; ++i)
      for (Port j = 0; j < n_; ++j) {
        auto& cell = ts_cells_[i * n_ + j];
        if (cell && *cell->deadline_slot <= slot_) {
          ++metrics_.flow(i, j).expired;
          rec.expired.push_back({i, j});
          cell.reset();
          ts_live_.set(i, j, false);
        }
      }

    metrics_.backlog_sum += be_backlog_;
    ++metrics_.backlog_samples;
    ++slot_;
    return rec;
  }

private:
  struct ArrivalCursor {
    FlowId id;
    std::int64_t period = 1;
    Slot next_arrival = 0;
    std::int64_t next_seq = 0;
  };
  struct BeCell {
    Slot arrival = 0;
    std::uint64_t seq = 0;
  };

  void schedule_arrivals(FlowId id, FlowParams f) {
    // First cell arriving at or after the current slot.
    std::int64_t s = 0;
    if (f.offset < slot_) s = ceil_div(slot_ - f.offset, f.period);
    arrivals_.push_back({id, f.period, f.offset + s * f.period, s});
  }

  std::size_t n_;
  SwitchConfig cfg_;
  TrafficSpec metadata_;
  Step1Selector selector_;
  BinaryMatrix ts_live_;
  std::vector<std::optional<Cell>> ts_cells_;
  std::vector<std::deque<BeCell>> voqs_;
  std::vector<std::uint64_t> voq_seq_;
  IslipState islip_;
  MetricsAccumulator metrics_;
  std::vector<ArrivalCursor> arrivals_;
  std::vector<bool> busy_in_, busy_out_;  // step-2 scratch
  std::int64_t be_backlog_ = 0;
  Slot slot_ = 0;
};

/// Closed-form M-TDMA transmit slot of one TS cell.
struct OracleCell {
  FlowId flow;
  std::int64_t seq = 0;
  Slot slot = 0;
  friend bool operator==(const OracleCell&, const OracleCell&) = default;
  friend auto operator<=>(const OracleCell&, const OracleCell&) = default;
};

/// Under SC1, cell s of flow (i, j) in matching k (0-based) leaves at
/// q*N + k with q = ceil((s*T + offset - k) / N). Returns every cell whose
/// transmit slot lies before horizon, sorted by (flow, seq).
inline std::vector<OracleCell> oracle_schedule_mtdma(const TrafficSpec& spec,
                                                     const FlowDecompositionSet& d, Slot horizon) {
  if (!check_sc1(spec)) throw ValidationError("closed-form M-TDMA schedule requires SC1");
  if (d.n() != spec.n()) throw ValidationError("decomposition does not match the switch size");
  const auto n = static_cast<std::int64_t>(spec.n());
  std::vector<OracleCell> out;
  for (const auto& [id, f] : spec.flows()) {
    const auto k = static_cast<std::int64_t>(d.index_of(id.input, id.output));
    for (std::int64_t s = 0; f.offset + s * f.period < horizon; ++s) {
      const std::int64_t q = ceil_div(s * f.period + f.offset - k, n);
      const Slot slot = q * n + k;
      if (slot < horizon) out.push_back({id, s, slot});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario runs

struct AdmissionRecord {
  FlowRequest flow;
  AdmissionDecision decision;
};

/// Outcome of subscribing a scenario's slot-0 flows and resolving the mode.
struct AdmissionPlan {
  TrafficSpec table;
  std::vector<AdmissionRecord> decisions;
  std::vector<FlowRequest> admitted;
  std::vector<FlowRequest> rejected;
  SchedulerMode mode;
};

inline std::string mode_name(const SchedulerMode& m) {
  return std::holds_alternative<MtdmaMode>(m) ? "MTDMA" : "MEDF";
}

inline TVector candidate_tvector(const TrafficSpec& spec, const FlowDecompositionSet& d) {
  TVector tv;
  for (const auto& m : d.matchings()) tv.t.push_back(candidate_period(spec, m));
  return tv;
}

/// Picks the scheduler for a table the arbiter has accepted, honouring the
/// scenario's mode and overrides.
inline SchedulerMode resolve_mode(const Scenario& sc, const TrafficSpec& table) {
  std::optional<FlowDecompositionSet> dec;
  if (sc.decomposition_override) dec = latin_to_decomposition(*sc.decomposition_override);

  auto medf = [&](bool verify) -> std::optional<SchedulerMode> {
    if (dec) {
      TVector tv = sc.tvector_override ? *sc.tvector_override : candidate_tvector(table, *dec);
      Sc2Certificate cert{*dec, tv};
      if (!verify || check_sc2_certificate(table, cert)) {
        if (utilization(tv) > Rational(1))
          throw ScenarioError("$.tvector_override: utilization exceeds 1");
        return MedfMode{std::move(cert)};
      }
      if (sc.tvector_override)
        throw ScenarioError("$.tvector_override: override is not an SC2 certificate for the flows");
    }
    if (auto cert = search_sc2(table)) return MedfMode{std::move(*cert)};
    return std::nullopt;
  };

  switch (sc.mode) {
    case ScenarioMode::ForceMtdma:
      return MtdmaMode{dec ? *dec : cyclic_decomposition(sc.n)};
    case ScenarioMode::ForceMedf:
      if (auto m = medf(false)) return *m;
      throw ScenarioError("$.mode: FORCE_MEDF but no SC2 certificate exists for the flows");
    case ScenarioMode::Auto:
      break;
  }
  if (check_sc1(table)) return MtdmaMode{dec ? *dec : cyclic_decomposition(sc.n)};
  if (auto m = medf(true)) return *m;
  throw std::logic_error("admitted table satisfies neither SC1 nor SC2");
}

/// Subscribes the slot-0 flows one by one through the arbiter (AUTO), or
/// admits them unchecked (forced modes), then resolves the scheduler.
inline AdmissionPlan plan_admission(const Scenario& sc) {
  AdmissionPlan plan{TrafficSpec(sc.n), {}, {}, {}, MtdmaMode{cyclic_decomposition(sc.n)}};
  for (const auto& f : sc.ts_flows) {
    if (f.subscribe_slot != 0) continue;
    FlowRequest req{f.input, f.output, f.offset, f.period};
    AdmissionDecision d = Reject{};
    if (sc.mode == ScenarioMode::Auto) {
      d = arbiter_admit(plan.table, req);
    } else {
      plan.table.set_flow(req.input, req.output, {req.offset, req.period});
      d = AdmitSc1{};
    }
    (admitted(d) ? plan.admitted : plan.rejected).push_back(req);
    plan.decisions.push_back({req, std::move(d)});
  }
  plan.mode = resolve_mode(sc, plan.table);
  return plan;
}

struct FlowReport {
  FlowRequest flow;
  FlowCounters counters;
  std::int64_t live_at_end = 0;
};

struct VoqReport {
  Port input = 0;
  Port output = 0;
  VoqCounters counters;
  std::int64_t backlog_at_end = 0;
};

struct SimulationReport {
  std::size_t n = 0;
  Slot slots = 0;
  SchedulerMode mode;
  std::vector<FlowRequest> admitted;
  std::vector<FlowRequest> rejected;
  std::vector<FlowReport> per_flow;
  std::vector<VoqReport> voqs;  // only VOQs that saw traffic
  std::int64_t be_arrivals = 0;
  std::int64_t be_delivered = 0;
  std::int64_t be_drops = 0;
  double be_mean_backlog = 0.0;
  std::map<std::int64_t, std::int64_t> ts_delay_histogram;
  std::vector<SlotRecord> trace;  // filled when requested

  std::int64_t ts_expired_total() const {
    std::int64_t s = 0;
    for (const auto& f : per_flow) s += f.counters.expired;
    return s;
  }
};

struct RunOptions {
  bool keep_trace = false;
};

/// Per-slot BE arrival source for a scenario.
class BeSource {
public:
  explicit BeSource(const Scenario& sc) : n_(sc.n), traffic_(sc.be_traffic) {
    if (auto* b = std::get_if<BernoulliBeTraffic>(&traffic_)) rng_.seed(b->seed);
    if (auto* e = std::get_if<ExplicitBeTraffic>(&traffic_))
      for (const auto& a : e->arrivals) by_slot_[a.slot].emplace_back(a.input, a.output);
  }

  std::vector<std::pair<Port, Port>> at(Slot t) {
    if (auto* b = std::get_if<BernoulliBeTraffic>(&traffic_)) {
      std::vector<std::pair<Port, Port>> out;
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (Port i = 0; i < n_; ++i)
        for (Port j = 0; j < n_; ++j)
          if (u(rng_) < b->rate_of(i, j)) out.emplace_back(i, j);
      return out;
    }
    auto it = by_slot_.find(t);
    return it == by_slot_.end() ? std::vector<std::pair<Port, Port>>{} : it->second;
  }

private:
  std::size_t n_;
  BeTraffic traffic_;
  std::mt19937_64 rng_;
  std::map<Slot, std::vector<std::pair<Port, Port>>> by_slot_;
};

inline SimulationReport run(const Scenario& sc, RunOptions opts = {}) {
  AdmissionPlan plan = plan_admission(sc);
  SimulationReport rep;
  rep.n = sc.n;
  rep.slots = horizon_of(sc);
  rep.admitted = plan.admitted;
  rep.rejected = plan.rejected;

  Switch sw(plan.table, plan.mode, {sc.voq_capacity, sc.islip_iterations});
  BeSource be(sc);

  std::map<Slot, std::vector<FlowRequest>> late;
  for (const auto& f : sc.ts_flows)
    if (f.subscribe_slot != 0) late[f.subscribe_slot].push_back({f.input, f.output, f.offset, f.period});

  TrafficSpec table = plan.table;
  for (Slot t = 0; t < rep.slots; ++t) {
    if (auto it = late.find(t); it != late.end()) {
      for (const auto& req : it->second) {
        if (table.present(req.input, req.output)) {
          rep.rejected.push_back(req);
          continue;
        }
        AdmissionDecision d = arbiter_admit(table, req);
        if (!admitted(d)) {
          rep.rejected.push_back(req);
          continue;
        }
        rep.admitted.push_back(req);
        sw.subscribe(req, resolve_mode(sc, table));
      }
    }
    const auto arrivals = be.at(t);
    SlotRecord rec = sw.step(arrivals);
    if (opts.keep_trace || sc.emit_trace) rep.trace.push_back(std::move(rec));
  }

  rep.mode = sw.mode();
  const auto& m = sw.metrics();
  for (const auto& [id, f] : sw.metadata().flows()) {
    FlowReport fr{{id.input, id.output, f.offset, f.period}, m.flow(id.input, id.output), 0};
    fr.live_at_end = sw.ts_cell(id.input, id.output).has_value() ? 1 : 0;
    rep.per_flow.push_back(fr);
  }
  for (Port i = 0; i < sc.n; ++i)
    for (Port j = 0; j < sc.n; ++j) {
      const auto& q = m.queue(i, j);
      rep.be_arrivals += q.arrivals;
      rep.be_delivered += q.delivered;
      rep.be_drops += q.drops;
      if (q.arrivals)
        rep.voqs.push_back({i, j, q, static_cast<std::int64_t>(sw.voq_length(i, j))});
    }
  rep.be_mean_backlog = m.mean_backlog();
  rep.ts_delay_histogram = m.ts_delay_histogram;
  return rep;
}

/// Per-flow and per-VOQ conservation of cells at the end of a run.
inline bool conservation_holds(const SimulationReport& rep) {
  for (const auto& f : rep.per_flow) {
    const auto& c = f.counters;
    if (c.arrivals != c.delivered + c.expired + f.live_at_end) return false;
  }
  for (const auto& q : rep.voqs) {
    const auto& c = q.counters;
    if (c.arrivals != c.delivered + c.drops + q.backlog_at_end) return false;
  }
  return true;
}

}  // namespace tsn
