#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alma/classifier.hpp"
#include "alma/consolidation.hpp"
#include "alma/cycles.hpp"
#include "alma/migration.hpp"

namespace alma {

enum class PolicyMode { Traditional, Alma };

std::string to_string(PolicyMode mode);
PolicyMode policy_mode_from_string(const std::string& text);

struct Policy {
  PolicyMode mode = PolicyMode::Alma;
  /// Longest a request may be postponed (seconds).
  double max_wait = 600.0;
  /// Cancel when the workload ends sooner than this after the request.
  /// Unset: the migration-time upper bound of the VM at full link speed.
  std::optional<double> cancel_horizon;
  double link_bandwidth = 125.0;  // MB/s
  /// 0 means unlimited.
  std::size_t max_concurrent = 0;

  void validate() const;
};

enum class DecisionKind { Immediate, Postponed, Cancelled };

std::string to_string(DecisionKind kind);
DecisionKind decision_kind_from_string(const std::string& text);

struct Decision {
  std::string vm_id;
  DecisionKind kind = DecisionKind::Immediate;
  double submitted_at = 0.0;
  double scheduled_at = 0.0;
  std::string reason;
};

/// What the cycle analysis knows about a VM at decision time.
struct CycleState {
  enum class Status { Missing, WarmingUp, Acyclic, Cyclic };
  Status status = Status::Missing;
  CycleProfile profile;
};

/// Cycle analysis restricted to the samples fully observed by `now`
/// (sample k covers [k*interval, (k+1)*interval)). Alma decisions need at
/// least two detected cycles of history.
CycleState characterize_until(const ClassificationSeries& classes, double now,
                              const CycleOptions& options = {},
                              DecomposeMode mode = DecomposeMode::FirstCycle);

struct DecisionContext {
  double interval = kDefaultInterval;
  /// When the VM's workload ends, if known.
  std::optional<double> workload_end;
  /// Resolved cancel horizon (seconds).
  double cancel_horizon = 0.0;
};

/// Postpone, run immediately or cancel. Throws ConfigurationError when the
/// policy is alma and the cycle state is Missing.
Decision decide(const MigrationRequest& request, const CycleState& cycles, double now,
                const Policy& policy, const DecisionContext& context);

/// Start, end and workload class of one migration, for accuracy plots.
struct MigrationRecord {
  MigrationRequest request;
  Decision decision;
  bool executed = false;
  double executed_at = 0.0;
  MigrationOutcome outcome;
  Suitability class_at_request = Suitability::NLM;
  Suitability class_at_execution = Suitability::NLM;
};

struct VmTimeline {
  std::string vm_id;
  double interval = kDefaultInterval;
  std::vector<Suitability> classes;
};

struct ScenarioReport {
  std::string scenario;
  PolicyMode mode = PolicyMode::Alma;
  std::uint64_t seed = 0;
  std::vector<MigrationRecord> migrations;
  std::vector<VmTimeline> timelines;
  double total_traffic = 0.0;  // MB, sum over migrations
  double link_traffic = 0.0;   // MB, integral of bandwidth in use over time
  double total_t_mig = 0.0;
  double total_t_down = 0.0;
  double span_start = 0.0;
  double span_end = 0.0;

  const VmTimeline* timeline(const std::string& vm_id) const;
};

struct Scenario;

/// Discrete-event run of a scenario under `policy`. Per-VM analysis happens
/// before the event loop; the loop is single-threaded.
ScenarioReport run(const Scenario& scenario, const Policy& policy);

struct ProbeResult {
  double total_seconds = 0.0;
  std::vector<double> per_vm_seconds;
};

/// Times classify_series, cycle analysis and decide over `n_vms` synthetic
/// streams of `samples_per_vm` samples each. Trace generation is excluded
/// from the timing.
ProbeResult throughput_probe(std::size_t n_vms, std::size_t samples_per_vm,
                             std::uint64_t seed = 1);

}  // namespace alma
