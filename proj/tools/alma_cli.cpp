// Command-line front end: simulate scenarios, compare reports, inspect
// cycles and run single migrations.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "alma/classifier.hpp"
#include "alma/consolidation.hpp"
#include "alma/cycles.hpp"
#include "alma/error.hpp"
#include "alma/migration.hpp"
#include "alma/orchestrator.hpp"
#include "alma/report.hpp"
#include "alma/scenario.hpp"
#include "alma/serialize.hpp"
#include "alma/trace.hpp"

namespace {

using nlohmann::json;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw alma::Error("cannot write " + path);
  out << text;
}

alma::NBModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw alma::Error("cannot open model " + path);
  return json::parse(in).get<alma::NBModel>();
}

const alma::VMConfig& find_vm(const alma::Scenario& s, const std::string& id, std::size_t& index) {
  for (index = 0; index < s.vms.size(); ++index) {
    if (s.vms[index].spec.vm_id == id) return s.vms[index];
  }
  throw alma::ScenarioError("scenario has no VM " + id);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workload-cycle aware live-migration orchestration"};
  app.require_subcommand(1);

  // simulate
  std::string scenario_path, mode = "alma", out_path;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario under one policy");
  simulate->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  simulate->add_option("--mode", mode, "alma or traditional")
      ->check(CLI::IsMember({"alma", "traditional"}));
  simulate->add_option("--out", out_path, "Report JSON (default stdout)");

  // compare
  std::string baseline_path, candidate_path, table_out;
  auto* compare = app.add_subcommand("compare", "Reduction table of two reports");
  compare->add_option("--baseline", baseline_path, "Traditional-mode report")->required();
  compare->add_option("--candidate", candidate_path, "Alma-mode report")->required();
  compare->add_option("--out", table_out, "Also write the table as JSON");

  // diagram
  std::string report_path, vm_id, diagram_out;
  auto* diagram = app.add_subcommand("diagram", "Cycle-accuracy event CSV for one VM");
  diagram->add_option("--report", report_path, "Report JSON")->required();
  diagram->add_option("--vm", vm_id, "VM id")->required();
  diagram->add_option("--out", diagram_out, "CSV path (default stdout)");

  // cycles
  std::string trace_path, model_path, profile_out, spectrum_out, decompose_mode = "first-cycle";
  double trace_interval = 0.0, threshold = 4.0;
  bool raw_cpu = false;
  auto* cycles = app.add_subcommand("cycles", "Detect and decompose the cycle of a trace");
  cycles->add_option("--trace", trace_path, "Trace CSV")->required();
  cycles->add_option("--model", model_path, "Classifier model JSON (default: built-in)");
  cycles->add_option("--interval", trace_interval, "Resample to this interval (s)");
  cycles->add_option("--threshold", threshold, "Acyclicity threshold");
  cycles->add_option("--decompose", decompose_mode, "first-cycle or majority")
      ->check(CLI::IsMember({"first-cycle", "majority"}));
  cycles->add_flag("--raw-cpu", raw_cpu, "Detect the period on raw CPU load");
  cycles->add_option("--out", profile_out, "Profile JSON (default stdout)");
  cycles->add_option("--spectrum", spectrum_out, "Spectrum CSV");

  // migrate-once
  alma::MigrationParams params;
  double dirty_rate = 0.0;
  std::string migrate_out;
  auto* migrate = app.add_subcommand("migrate-once", "Simulate one pre-copy migration");
  migrate->add_option("--v-mem", params.v_mem, "VM memory (MB)");
  migrate->add_option("--bandwidth", params.bandwidth, "Link bandwidth (MB/s)");
  migrate->add_option("--dirty-rate", dirty_rate, "Dirty pages per second");
  migrate->add_option("--page-size", params.page_size, "Page size (KB)");
  migrate->add_option("--max-rounds", params.max_rounds, "Iteration limit");
  migrate->add_option("--dirty-threshold", params.dirty_page_threshold, "Stop below this many pages");
  migrate->add_option("--cap-factor", params.transfer_cap_factor, "Transfer cap (x v_mem)");
  migrate->add_option("--activation", params.activation_overhead, "Activation overhead (s)");
  migrate->add_option("--out", migrate_out, "Outcome JSON (default stdout)");

  // train
  std::uint64_t train_seed = 7;
  std::size_t bins = 10;
  double alpha = 1.0;
  bool four_class = false;
  std::string train_out;
  auto* train = app.add_subcommand("train", "Train a classifier on the synthetic corpus");
  train->add_option("--seed", train_seed, "Corpus seed");
  train->add_option("--bins", bins, "Bins per load index");
  train->add_option("--alpha", alpha, "Laplace smoothing");
  train->add_flag("--four-class", four_class, "CPU/MEM/IO/IDLE classes");
  train->add_option("--out", train_out, "Model JSON (default stdout)");

  // plan
  double plan_at = 0.0;
  std::string plan_out;
  auto* plan = app.add_subcommand("plan", "First-fit-decreasing plan for a scenario's placement");
  plan->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  plan->add_option("--at", plan_at, "Submission time (s)");
  plan->add_option("--out", plan_out, "Plan JSON (default stdout)");

  // synth
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write the trace a scenario gives one VM");
  synth->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  synth->add_option("--vm", vm_id, "VM id")->required();
  synth->add_option("--out", synth_out, "Trace CSV (default stdout)");

  // probe
  std::size_t probe_vms = 10, probe_samples = 10000;
  auto* probe = app.add_subcommand("probe", "Time per-VM analysis over synthetic streams");
  probe->add_option("--vms", probe_vms, "Number of VMs");
  probe->add_option("--samples", probe_samples, "Samples per VM");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      auto scenario = alma::load_scenario(scenario_path);
      auto policy = scenario.policy;
      policy.mode = alma::policy_mode_from_string(mode);
      write_output(out_path, alma::dump_report(alma::run(scenario, policy)));
    } else if (*compare) {
      auto table = alma::compare(alma::load_report(baseline_path), alma::load_report(candidate_path));
      std::cout << alma::format_table(table);
      if (!table_out.empty()) write_output(table_out, json(table).dump(2) + "\n");
    } else if (*diagram) {
      write_output(diagram_out, alma::emit_cycle_diagram(alma::load_report(report_path), vm_id));
    } else if (*cycles) {
      auto series = alma::parse_trace_file(trace_path);
      if (trace_interval > 0.0) series = alma::resample(series, trace_interval);
      const auto model = model_path.empty() ? alma::default_model() : load_model(model_path);
      const auto classes = alma::classify_series(model, series);
      alma::CycleOptions options;
      options.strength_threshold = threshold;
      const auto signal = raw_cpu ? alma::cpu_signal(series) : alma::to_signal(classes);
      const auto detection = alma::detect_cycle_size(std::span<const double>(signal), options);

      json doc{{"version", 1},
               {"source", raw_cpu ? "cpu" : "classification"},
               {"samples", series.size()},
               {"interval", series.interval},
               {"cyclic", detection.cyclic},
               {"strength", detection.strength},
               {"peak_bin", detection.peak_bin}};
      if (detection.cyclic) {
        const auto mode_value = decompose_mode == "majority" ? alma::DecomposeMode::MajorityVote
                                                             : alma::DecomposeMode::FirstCycle;
        doc["profile"] = alma::decompose(classes, detection.cycle_size, detection.strength, mode_value);
      } else {
        doc["profile"] = nullptr;
      }
      write_output(profile_out, doc.dump(2) + "\n");

      if (!spectrum_out.empty()) {
        const auto mag = alma::magnitude_spectrum(signal);
        std::ostringstream csv;
        csv << "bin,frequency,period,magnitude\n";
        const double n = static_cast<double>(signal.size());
        for (std::size_t k = 0; k < mag.size(); ++k) {
          csv << k << ',' << static_cast<double>(k) / n << ',';
          if (k > 0) csv << n / static_cast<double>(k);
          csv << ',' << mag[k] << '\n';
        }
        write_output(spectrum_out, csv.str());
      }
    } else if (*migrate) {
      auto outcome = alma::simulate_precopy(params, alma::DirtyRateProfile::constant(dirty_rate));
      json doc{{"version", 1}, {"params", params}, {"dirty_rate", dirty_rate}, {"outcome", outcome}};
      write_output(migrate_out, doc.dump(2) + "\n");
    } else if (*train) {
      alma::NBModel model;
      if (four_class) {
        auto corpus = alma::default_kind_corpus(train_seed);
        model = alma::train_four_class(corpus, bins, alpha);
      } else {
        auto corpus = alma::default_training_corpus(train_seed);
        model = alma::train(corpus, bins, alpha);
      }
      write_output(train_out, json(model).dump(2) + "\n");
    } else if (*plan) {
      auto scenario = alma::load_scenario(scenario_path);
      std::vector<alma::VMSpec> vms;
      for (const auto& v : scenario.vms) vms.push_back(v.spec);
      auto requests = alma::plan(scenario.hosts, vms, plan_at);
      write_output(plan_out, json{{"version", 1}, {"requests", requests}}.dump(2) + "\n");
    } else if (*synth) {
      auto scenario = alma::load_scenario(scenario_path);
      std::size_t index = 0;
      find_vm(scenario, vm_id, index);
      auto traces = alma::materialize_traces(scenario);
      std::ostringstream csv;
      alma::write_trace(csv, traces[index]);
      write_output(synth_out, csv.str());
    } else if (*probe) {
      auto result = alma::throughput_probe(probe_vms, probe_samples);
      json doc{{"version", 1},
               {"vms", probe_vms},
               {"samples_per_vm", probe_samples},
               {"total_seconds", result.total_seconds},
               {"per_vm_seconds", result.per_vm_seconds}};
      std::cout << doc.dump(2) << "\n";
    }
  } catch (const alma::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const alma::PlanningError& e) {
    std::cerr << "planning error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
