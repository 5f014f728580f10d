#include "alma/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "alma/error.hpp"
#include "alma/serialize.hpp"

namespace alma {
namespace {

using nlohmann::json;

PhaseSpec parse_phase(const json& j) {
  const auto kind = phase_kind_from_string(j.at("kind").get<std::string>());
  PhaseLevels levels = default_levels(kind);
  levels.cpu = j.value("cpu", levels.cpu);
  levels.mem = j.value("mem", levels.mem);
  levels.dirty_rate = j.value("dirty_rate", levels.dirty_rate);
  levels.io_rate = j.value("io_rate", levels.io_rate);
  return PhaseSpec(kind, j.at("duration").get<double>(), levels);
}

TraceSource parse_trace_source(const json& j) {
  TraceSource src;
  if (j.contains("file")) {
    src.file = j.at("file").get<std::string>();
    return src;
  }
  for (const auto& p : j.at("phases")) src.phases.push_back(parse_phase(p));
  src.repetitions = j.value("repetitions", 1);
  src.noise = j.value("noise", 0.0);
  if (j.contains("seed")) src.seed = j.at("seed").get<std::uint64_t>();
  return src;
}

std::string resolve(const std::string& base, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

void validate(const Scenario& s) {
  if (s.version != kScenarioVersion) {
    throw ScenarioError("unsupported scenario version " + std::to_string(s.version));
  }
  if (!(s.interval > 0.0)) throw ScenarioError("interval must be positive");
  std::set<std::string> hosts, vms;
  for (const auto& h : s.hosts) {
    if (!hosts.insert(h.host_id).second) throw ScenarioError("duplicate host " + h.host_id);
    if (!(h.cpu_capacity > 0.0) || !(h.mem_capacity > 0.0)) {
      throw ScenarioError("host " + h.host_id + " needs positive capacities");
    }
  }
  for (const auto& v : s.vms) {
    if (!vms.insert(v.spec.vm_id).second) throw ScenarioError("duplicate VM " + v.spec.vm_id);
    if (!hosts.count(v.spec.current_host)) {
      throw ScenarioError("VM " + v.spec.vm_id + " on unknown host " + v.spec.current_host);
    }
    if (!(v.spec.mem > 0.0) || !(v.spec.vcpus > 0.0)) {
      throw ScenarioError("VM " + v.spec.vm_id + " needs positive vcpus and mem");
    }
    if (!v.trace.file && v.trace.phases.empty()) {
      throw ScenarioError("VM " + v.spec.vm_id + " has no trace");
    }
  }
  for (const auto& e : s.events) {
    if (e.at < 0.0) throw ScenarioError("consolidation time must be >= 0");
    if (!e.moves) continue;
    for (const auto& m : *e.moves) {
      if (!vms.count(m.vm_id)) throw ScenarioError("move names unknown VM " + m.vm_id);
      if (!hosts.count(m.target_host)) {
        throw ScenarioError("move names unknown host " + m.target_host);
      }
    }
  }
  try {
    s.policy.validate();
    MigrationParams probe = s.migration;
    probe.v_mem = 1.0;
    probe.bandwidth = 1.0;
    probe.validate();
  } catch (const Error& e) {
    throw ScenarioError(e.what());
  }
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir) {
  Scenario s;
  s.base_dir = base_dir;
  try {
    const json j = json::parse(json_text);
    s.version = j.value("version", kScenarioVersion);
    s.name = j.value("name", std::string{});
    s.seed = j.value("seed", std::uint64_t{0});
    s.interval = j.value("interval", kDefaultInterval);

    for (const auto& h : j.at("hosts")) {
      s.hosts.push_back({h.at("id").get<std::string>(), h.at("cpu").get<double>(),
                         h.at("mem").get<double>()});
    }
    for (const auto& v : j.at("vms")) {
      VMConfig vm;
      vm.spec.vm_id = v.at("id").get<std::string>();
      vm.spec.vcpus = v.at("vcpus").get<double>();
      vm.spec.mem = v.at("mem").get<double>();
      vm.spec.current_host = v.at("host").get<std::string>();
      vm.trace = parse_trace_source(v.at("trace"));
      s.vms.push_back(std::move(vm));
    }
    if (j.contains("consolidation")) {
      for (const auto& e : j.at("consolidation")) {
        ConsolidationEvent ev;
        ev.at = e.at("at").get<double>();
        if (e.contains("moves")) {
          ev.moves.emplace();
          for (const auto& m : e.at("moves")) {
            ev.moves->push_back({m.at("vm").get<std::string>(), m.at("target").get<std::string>()});
          }
        }
        s.events.push_back(std::move(ev));
      }
    }
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      if (p.contains("mode")) s.policy.mode = policy_mode_from_string(p.at("mode"));
      s.policy.max_wait = p.value("max_wait", s.policy.max_wait);
      s.policy.link_bandwidth = p.value("link_bandwidth", s.policy.link_bandwidth);
      s.policy.max_concurrent = p.value("max_concurrent", s.policy.max_concurrent);
      if (p.contains("cancel_horizon") && !p.at("cancel_horizon").is_null()) {
        s.policy.cancel_horizon = p.at("cancel_horizon").get<double>();
      }
    }
    if (j.contains("migration")) {
      const auto& m = j.at("migration");
      auto& mp = s.migration;
      mp.page_size = m.value("page_size", mp.page_size);
      mp.max_rounds = m.value("max_rounds", mp.max_rounds);
      mp.dirty_page_threshold = m.value("dirty_page_threshold", mp.dirty_page_threshold);
      mp.transfer_cap_factor = m.value("transfer_cap_factor", mp.transfer_cap_factor);
      mp.activation_overhead = m.value("activation_overhead", mp.activation_overhead);
    }
    if (j.contains("classifier")) {
      const auto& c = j.at("classifier");
      if (c.contains("model")) s.classifier.model_file = c.at("model").get<std::string>();
      s.classifier.training_seed = c.value("training_seed", s.classifier.training_seed);
      s.classifier.bins = c.value("bins", s.classifier.bins);
      s.classifier.alpha = c.value("alpha", s.classifier.alpha);
      if (c.contains("label")) {
        const auto& l = c.at("label");
        auto& r = s.classifier.label_rule;
        r.max_dirty_rate = l.value("max_dirty_rate", r.max_dirty_rate);
        r.max_cpu = l.value("max_cpu", r.max_cpu);
        r.max_io_rate = l.value("max_io_rate", r.max_io_rate);
      }
    }
    if (j.contains("cycles")) {
      const auto& c = j.at("cycles");
      s.cycles.strength_threshold = c.value("strength_threshold", s.cycles.strength_threshold);
      const auto mode = c.value("decompose", std::string("first-cycle"));
      if (mode == "first-cycle") {
        s.decompose_mode = DecomposeMode::FirstCycle;
      } else if (mode == "majority") {
        s.decompose_mode = DecomposeMode::MajorityVote;
      } else {
        throw ScenarioError("unknown decompose mode '" + mode + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  } catch (const ScenarioError&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_scenario(buf.str(), dir.empty() ? "." : dir);
}

std::vector<LoadSeries> materialize_traces(const Scenario& scenario) {
  std::vector<LoadSeries> traces;
  traces.reserve(scenario.vms.size());
  for (std::size_t i = 0; i < scenario.vms.size(); ++i) {
    const auto& vm = scenario.vms[i];
    const auto& src = vm.trace;
    try {
      if (src.file) {
        auto raw = parse_trace_file(resolve(scenario.base_dir, *src.file), vm.spec.vm_id);
        traces.push_back(resample(raw, scenario.interval));
      } else {
        const auto seed = src.seed.value_or(scenario.seed * 1000003ULL + i);
        traces.push_back(synthesize(src.phases, src.repetitions, scenario.interval, src.noise,
                                    seed, vm.spec.vm_id));
      }
    } catch (const ScenarioError&) {
      throw;
    } catch (const Error& e) {
      throw ScenarioError("trace of VM " + vm.spec.vm_id + ": " + e.what());
    }
  }
  return traces;
}

NBModel scenario_model(const Scenario& scenario) {
  const auto& c = scenario.classifier;
  if (c.model_file) {
    std::ifstream in(resolve(scenario.base_dir, *c.model_file));
    if (!in) throw ScenarioError("cannot open model " + *c.model_file);
    try {
      return json::parse(in).get<NBModel>();
    } catch (const std::exception& e) {
      throw ScenarioError(std::string("model: ") + e.what());
    }
  }
  auto corpus = default_training_corpus(c.training_seed, 500, 0.1, c.label_rule);
  return train(corpus, c.bins, c.alpha);
}

}  // namespace alma
