#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alma/classifier.hpp"
#include "alma/consolidation.hpp"
#include "alma/cycles.hpp"
#include "alma/migration.hpp"
#include "alma/orchestrator.hpp"
#include "alma/trace.hpp"

namespace alma {

inline constexpr int kScenarioVersion = 1;

/// Where a VM's load trace comes from: a CSV file, or a phase synthesis.
struct TraceSource {
  std::optional<std::string> file;
  std::vector<PhaseSpec> phases;
  int repetitions = 1;
  double noise = 0.0;
  std::optional<std::uint64_t> seed;
};

struct VMConfig {
  VMSpec spec;
  TraceSource trace;
};

struct ExplicitMove {
  std::string vm_id;
  std::string target_host;
};

/// A consolidation instant: either planned by the first-fit-decreasing
/// planner, or a hand-written list of moves.
struct ConsolidationEvent {
  double at = 0.0;
  std::optional<std::vector<ExplicitMove>> moves;
};

struct ClassifierSettings {
  std::optional<std::string> model_file;
  std::uint64_t training_seed = 7;
  std::size_t bins = 10;
  double alpha = 1.0;
  LabelRule label_rule;
};

struct Scenario {
  int version = kScenarioVersion;
  std::string name;
  std::uint64_t seed = 0;
  double interval = kDefaultInterval;
  std::vector<HostSpec> hosts;
  std::vector<VMConfig> vms;
  std::vector<ConsolidationEvent> events;
  Policy policy;
  MigrationParams migration;  // v_mem and bandwidth are set per VM at run time
  ClassifierSettings classifier;
  CycleOptions cycles;
  DecomposeMode decompose_mode = DecomposeMode::FirstCycle;
  /// Directory relative trace and model paths resolve against.
  std::string base_dir = ".";
};

/// Parses a scenario document. Throws ScenarioError on invalid content.
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

/// Trace of every VM at the scenario interval, in scenario order.
std::vector<LoadSeries> materialize_traces(const Scenario& scenario);

/// Model named by the scenario, or a default model trained on synthetic
/// phase samples.
NBModel scenario_model(const Scenario& scenario);

}  // namespace alma
