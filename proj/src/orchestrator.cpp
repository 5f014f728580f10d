#include "alma/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "alma/error.hpp"
#include "alma/scenario.hpp"

namespace alma {
namespace {

constexpr double kTimeEps = 1e-9;

std::size_t sample_index(double t, double interval, std::size_t size) {
  if (size == 0) return 0;
  const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / interval + kTimeEps)));
  return std::min(k, size - 1);
}

double quantize_up(double t, double interval) {
  return std::ceil(t / interval - kTimeEps) * interval;
}

MigrationParams params_for(const Scenario& scenario, const VMSpec& vm, double bandwidth) {
  MigrationParams p = scenario.migration;
  p.v_mem = vm.mem;
  p.bandwidth = bandwidth;
  return p;
}

}  // namespace

std::string to_string(PolicyMode mode) {
  return mode == PolicyMode::Alma ? "alma" : "traditional";
}

PolicyMode policy_mode_from_string(const std::string& text) {
  if (text == "alma") return PolicyMode::Alma;
  if (text == "traditional") return PolicyMode::Traditional;
  throw ConfigurationError("unknown policy mode '" + text + "'");
}

void Policy::validate() const {
  if (!(max_wait >= 0.0)) throw ConfigurationError("max_wait must be >= 0");
  if (!(link_bandwidth > 0.0)) throw ConfigurationError("link_bandwidth must be positive");
  if (cancel_horizon && !(*cancel_horizon >= 0.0)) {
    throw ConfigurationError("cancel_horizon must be >= 0");
  }
}

std::string to_string(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::Immediate: return "immediate";
    case DecisionKind::Postponed: return "postponed";
    case DecisionKind::Cancelled: return "cancelled";
  }
  return "";
}

DecisionKind decision_kind_from_string(const std::string& text) {
  if (text == "immediate") return DecisionKind::Immediate;
  if (text == "postponed") return DecisionKind::Postponed;
  if (text == "cancelled") return DecisionKind::Cancelled;
  throw Error("unknown decision kind '" + text + "'");
}

CycleState characterize_until(const ClassificationSeries& classes, double now,
                              const CycleOptions& options, DecomposeMode mode) {
  CycleState state;
  const auto observed = static_cast<std::size_t>(
      std::min(static_cast<double>(classes.size()),
               std::max(0.0, std::floor(now / classes.interval + kTimeEps))));
  if (observed < 8) {
    state.status = CycleState::Status::WarmingUp;
    return state;
  }
  const auto window = classes.prefix(observed);
  const auto detection = detect_cycle_size(window, options);
  if (!detection.cyclic) {
    state.status = CycleState::Status::Acyclic;
    return state;
  }
  // A peak below bin 2 means the dominant period exceeds half the window.
  if (detection.peak_bin < 2 || 2 * detection.cycle_size > observed) {
    state.status = CycleState::Status::WarmingUp;
    return state;
  }
  state.status = CycleState::Status::Cyclic;
  state.profile = decompose(window, detection.cycle_size, detection.strength, mode);
  return state;
}

Decision decide(const MigrationRequest& request, const CycleState& cycles, double now,
                const Policy& policy, const DecisionContext& context) {
  Decision d;
  d.vm_id = request.vm_id;
  d.submitted_at = now;
  d.scheduled_at = now;
  d.kind = DecisionKind::Immediate;

  if (policy.mode == PolicyMode::Traditional) {
    d.reason = "traditional";
    return d;
  }
  if (context.workload_end && *context.workload_end - now < context.cancel_horizon) {
    d.kind = DecisionKind::Cancelled;
    d.reason = "workload-ending";
    return d;
  }

  auto postpone_by = [&](double wait, const char* reason) {
    if (wait > 0.0) {
      d.kind = DecisionKind::Postponed;
      d.scheduled_at = now + wait;
    }
    d.reason = reason;
  };

  switch (cycles.status) {
    case CycleState::Status::Missing:
      throw ConfigurationError("no cycle analysis for VM " + request.vm_id);
    case CycleState::Status::WarmingUp: d.reason = "warm-up"; return d;
    case CycleState::Status::Acyclic: d.reason = "acyclic"; return d;
    case CycleState::Status::Cyclic: break;
  }

  const auto m_current = static_cast<std::size_t>(std::llround(now / context.interval));
  const auto r = remaining_time(cycles.profile, m_current);
  switch (r.basis) {
    case PostponeBasis::AlreadyLM: d.reason = "already-LM"; break;
    case PostponeBasis::NoLMInCycle: postpone_by(policy.max_wait, "no-LM-in-cycle"); break;
    case PostponeBasis::WaitForLM: {
      const double wait = static_cast<double>(r.remain_time) * context.interval;
      if (wait <= policy.max_wait) {
        postpone_by(wait, "wait-for-LM");
      } else {
        postpone_by(policy.max_wait, "max-wait");
      }
      break;
    }
  }
  return d;
}

const VmTimeline* ScenarioReport::timeline(const std::string& vm_id) const {
  for (const auto& t : timelines) {
    if (t.vm_id == vm_id) return &t;
  }
  return nullptr;
}

ScenarioReport run(const Scenario& scenario, const Policy& policy) {
  policy.validate();
  const auto traces = materialize_traces(scenario);
  const auto model = scenario_model(scenario);
  const double interval = scenario.interval;

  std::vector<ClassificationSeries> classes;
  classes.reserve(traces.size());
  for (const auto& t : traces) classes.push_back(classify_series(model, t));

  std::map<std::string, std::size_t> vm_index;
  std::vector<VMSpec> placement;
  for (std::size_t i = 0; i < scenario.vms.size(); ++i) {
    vm_index[scenario.vms[i].spec.vm_id] = i;
    placement.push_back(scenario.vms[i].spec);
  }

  ScenarioReport report;
  report.scenario = scenario.name;
  report.mode = policy.mode;
  report.seed = scenario.seed;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    report.timelines.push_back({placement[i].vm_id, interval, classes[i].classes});
  }

  auto events = scenario.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.at < b.at; });

  std::vector<std::size_t> record_vm;
  for (const auto& event : events) {
    const double now = quantize_up(event.at, interval);
    std::vector<MigrationRequest> requests;
    if (event.moves) {
      for (const auto& m : *event.moves) {
        const auto& vm = placement[vm_index.at(m.vm_id)];
        if (vm.current_host != m.target_host) {
          requests.push_back({m.vm_id, vm.current_host, m.target_host, now});
        }
      }
    } else {
      try {
        requests = plan(scenario.hosts, placement, now);
      } catch (const PlanningError& e) {
        throw ScenarioError(std::string("consolidation at ") + std::to_string(now) + ": " +
                            e.what());
      }
    }

    for (const auto& req : requests) {
      const std::size_t i = vm_index.at(req.vm_id);
      const double workload_end = traces[i].end_time();
      if (now >= workload_end) {
        throw ScenarioError("trace of VM " + req.vm_id + " exhausted before request at " +
                            std::to_string(now));
      }
      DecisionContext ctx;
      ctx.interval = interval;
      ctx.workload_end = workload_end;
      ctx.cancel_horizon = policy.cancel_horizon.value_or(
          bounds(params_for(scenario, placement[i], policy.link_bandwidth)).upper_mig);

      CycleState state;
      if (policy.mode == PolicyMode::Alma) {
        state = characterize_until(classes[i], now, scenario.cycles, scenario.decompose_mode);
      }
      MigrationRecord rec;
      rec.request = req;
      rec.decision = decide(req, state, now, policy, ctx);
      rec.class_at_request = classes[i].classes[sample_index(now, interval, classes[i].size())];
      if (rec.decision.kind != DecisionKind::Cancelled) {
        if (rec.decision.scheduled_at >= workload_end) {
          throw ScenarioError("trace of VM " + req.vm_id + " exhausted before migration at " +
                              std::to_string(rec.decision.scheduled_at));
        }
        placement[i].current_host = req.target_host;
      }
      report.migrations.push_back(std::move(rec));
      record_vm.push_back(i);
    }
  }

  // Execution on one shared link with fair-share bandwidth.
  std::vector<DirtyRateProfile> dirty;
  dirty.reserve(traces.size());
  for (const auto& t : traces) dirty.push_back(DirtyRateProfile::from_series(t));

  std::vector<std::size_t> queue;
  for (std::size_t r = 0; r < report.migrations.size(); ++r) {
    if (report.migrations[r].decision.kind != DecisionKind::Cancelled) queue.push_back(r);
  }
  std::stable_sort(queue.begin(), queue.end(), [&](std::size_t a, std::size_t b) {
    return report.migrations[a].decision.scheduled_at < report.migrations[b].decision.scheduled_at;
  });

  struct Active {
    std::size_t record;
    PrecopyProcess process;
  };
  std::vector<Active> active;
  std::deque<std::size_t> waiting;
  std::size_t next = 0;
  double t = queue.empty() ? 0.0 : report.migrations[queue.front()].decision.scheduled_at;
  const double link = policy.link_bandwidth;

  auto vm_busy = [&](std::size_t vm) {
    return std::any_of(active.begin(), active.end(),
                       [&](const Active& a) { return record_vm[a.record] == vm; });
  };

  while (next < queue.size() || !waiting.empty() || !active.empty()) {
    while (next < queue.size() &&
           report.migrations[queue[next]].decision.scheduled_at <= t + kTimeEps) {
      waiting.push_back(queue[next++]);
    }
    for (auto it = waiting.begin(); it != waiting.end();) {
      const bool slot = policy.max_concurrent == 0 || active.size() < policy.max_concurrent;
      const std::size_t vm = record_vm[*it];
      if (!slot || vm_busy(vm)) {
        ++it;
        continue;
      }
      auto& rec = report.migrations[*it];
      rec.executed = true;
      rec.executed_at = t;
      rec.class_at_execution = classes[vm].classes[sample_index(t, interval, classes[vm].size())];
      active.push_back({*it, PrecopyProcess(params_for(scenario, placement[vm], link), t)});
      it = waiting.erase(it);
    }

    if (active.empty()) {
      if (next < queue.size()) {
        t = report.migrations[queue[next]].decision.scheduled_at;
        continue;
      }
      break;
    }

    const auto users = static_cast<std::size_t>(std::count_if(
        active.begin(), active.end(), [](const Active& a) { return a.process.uses_link(); }));
    const double share = users > 0 ? link / static_cast<double>(users) : link;

    double dt = HUGE_VAL;
    for (const auto& a : active) dt = std::min(dt, a.process.time_to_stage_end(share));
    if (next < queue.size()) {
      dt = std::min(dt, report.migrations[queue[next]].decision.scheduled_at - t);
    }
    dt = std::max(dt, 0.0);

    report.link_traffic += share * static_cast<double>(users) * dt;
    for (auto& a : active) a.process.advance(dt, share, dirty[record_vm[a.record]]);
    t += dt;

    for (auto it = active.begin(); it != active.end();) {
      if (it->process.done()) {
        report.migrations[it->record].outcome = it->process.outcome();
        it = active.erase(it);
      } else {
        ++it;
      }
    }
  }

  bool first = true;
  for (const auto& rec : report.migrations) {
    if (!rec.executed) continue;
    report.total_traffic += rec.outcome.transferred;
    report.total_t_mig += rec.outcome.t_mig;
    report.total_t_down += rec.outcome.t_down;
    const double end = rec.executed_at + rec.outcome.t_mig;
    report.span_start = first ? rec.executed_at : std::min(report.span_start, rec.executed_at);
    report.span_end = first ? end : std::max(report.span_end, end);
    first = false;
  }
  return report;
}

ProbeResult throughput_probe(std::size_t n_vms, std::size_t samples_per_vm,
                             std::uint64_t seed) {
  ProbeResult result;
  if (n_vms == 0) return result;
  const auto model = default_model(seed);
  Policy policy;
  policy.mode = PolicyMode::Alma;

  result.per_vm_seconds.reserve(n_vms);
  for (std::size_t v = 0; v < n_vms; ++v) {
    const double mem_len = 10.0 + static_cast<double>(v % 7);
    const double lm_len = 20.0 + static_cast<double>(v % 11);
    std::vector<PhaseSpec> phases = {PhaseSpec(PhaseKind::Mem, mem_len),
                                     PhaseSpec(PhaseKind::Idle, lm_len / 2),
                                     PhaseSpec(PhaseKind::Cpu, lm_len / 2)};
    const double cycle = mem_len + lm_len;
    const int reps = static_cast<int>(std::ceil(static_cast<double>(samples_per_vm) / cycle));
    auto series = synthesize(phases, std::max(reps, 1), 1.0, 0.05, seed + v, "probe");
    series.samples.resize(std::min(series.samples.size(), samples_per_vm));

    const auto start = std::chrono::steady_clock::now();
    const auto classes = classify_series(model, series);
    const double now = series.end_time();
    const auto state = characterize_until(classes, now);
    DecisionContext ctx;
    ctx.interval = series.interval;
    const MigrationRequest request{"probe", "a", "b", now};
    if (state.status != CycleState::Status::Missing) decide(request, state, now, policy, ctx);
    const auto stop = std::chrono::steady_clock::now();

    const double seconds = std::chrono::duration<double>(stop - start).count();
    result.per_vm_seconds.push_back(seconds);
    result.total_seconds += seconds;
  }
  return result;
}

}  // namespace alma
