#include "alma/serialize.hpp"

#include <cmath>
#include <fstream>

#include "alma/error.hpp"

namespace alma {

using nlohmann::json;

void to_json(json& j, const NBModel& m) {
  json likelihoods = json::array();
  for (const auto& per_class : m.likelihoods) {
    json features = json::array();
    for (const auto& row : per_class) features.push_back(row);
    likelihoods.push_back(features);
  }
  json suitability = json::array();
  for (auto s : m.suitability) suitability.push_back(to_string(s));
  json edges = json::array();
  for (const auto& e : m.edges) edges.push_back(e);
  j = json{{"version", kModelVersion},
           {"mode", m.mode == ClassifierMode::Binary ? "binary" : "four-class"},
           {"features", {"cpu", "mem", "dirty_rate", "io_rate"}},
           {"classes", m.class_names},
           {"suitability", suitability},
           {"bins", m.bins},
           {"alpha", m.alpha},
           {"priors", m.priors},
           {"edges", edges},
           {"likelihoods", likelihoods}};
}

void from_json(const json& j, NBModel& m) {
  if (j.at("version").get<int>() != kModelVersion) throw Error("unsupported model version");
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "binary") {
    m.mode = ClassifierMode::Binary;
  } else if (mode == "four-class") {
    m.mode = ClassifierMode::FourClass;
  } else {
    throw Error("unknown classifier mode '" + mode + "'");
  }
  m.class_names = j.at("classes").get<std::vector<std::string>>();
  m.suitability.clear();
  for (const auto& s : j.at("suitability")) m.suitability.push_back(suitability_from_string(s));
  m.bins = j.at("bins").get<std::size_t>();
  m.alpha = j.at("alpha").get<double>();
  m.priors = j.at("priors").get<std::vector<double>>();
  const auto& edges = j.at("edges");
  if (edges.size() != kFeatureCount) throw Error("model: expected 4 edge lists");
  for (std::size_t f = 0; f < kFeatureCount; ++f) m.edges[f] = edges[f].get<std::vector<double>>();
  m.likelihoods.clear();
  for (const auto& per_class : j.at("likelihoods")) {
    if (per_class.size() != kFeatureCount) throw Error("model: expected 4 likelihood tables");
    std::array<std::vector<double>, kFeatureCount> tables;
    for (std::size_t f = 0; f < kFeatureCount; ++f) tables[f] = per_class[f].get<std::vector<double>>();
    m.likelihoods.push_back(std::move(tables));
  }
  m.check_invariants();
}

void to_json(json& j, const CycleProfile& p) {
  j = json{{"version", 1},
           {"cycle_size", p.cycle_size},
           {"array_lm", p.array_lm},
           {"array_nlm", p.array_nlm},
           {"dominant_period_strength", p.dominant_period_strength}};
}

void from_json(const json& j, CycleProfile& p) {
  p.cycle_size = j.at("cycle_size").get<std::size_t>();
  p.array_lm = j.at("array_lm").get<std::vector<std::size_t>>();
  p.array_nlm = j.at("array_nlm").get<std::vector<std::size_t>>();
  p.dominant_period_strength = j.at("dominant_period_strength").get<double>();
}

void to_json(json& j, const MigrationParams& p) {
  j = json{{"v_mem", p.v_mem},
           {"bandwidth", p.bandwidth},
           {"page_size", p.page_size},
           {"max_rounds", p.max_rounds},
           {"dirty_page_threshold", p.dirty_page_threshold},
           {"transfer_cap_factor", p.transfer_cap_factor},
           {"activation_overhead", p.activation_overhead}};
}

void to_json(json& j, const MigrationBounds& b) {
  j = json{{"lower_mig", b.lower_mig}, {"upper_mig", b.upper_mig}, {"upper_down", b.upper_down}};
}

void from_json(const json& j, MigrationBounds& b) {
  b.lower_mig = j.at("lower_mig").get<double>();
  b.upper_mig = j.at("upper_mig").get<double>();
  b.upper_down = j.at("upper_down").get<double>();
}

void to_json(json& j, const MigrationOutcome& o) {
  j = json{{"start_time", o.start_time},
           {"t_mig", o.t_mig},
           {"t_down", o.t_down},
           {"transferred", o.transferred},
           {"rounds", o.rounds},
           {"stop_reason", to_string(o.stop_reason)},
           {"bounds", o.bounds},
           {"round_volumes", o.round_volumes},
           {"final_copy", o.final_copy}};
}

void from_json(const json& j, MigrationOutcome& o) {
  o.start_time = j.at("start_time").get<double>();
  o.t_mig = j.at("t_mig").get<double>();
  o.t_down = j.at("t_down").get<double>();
  o.transferred = j.at("transferred").get<double>();
  o.rounds = j.at("rounds").get<int>();
  o.stop_reason = stop_reason_from_string(j.at("stop_reason").get<std::string>());
  o.bounds = j.at("bounds").get<MigrationBounds>();
  o.round_volumes = j.at("round_volumes").get<std::vector<double>>();
  o.final_copy = j.at("final_copy").get<double>();
}

void to_json(json& j, const MigrationRequest& r) {
  j = json{{"vm_id", r.vm_id},
           {"source_host", r.source_host},
           {"target_host", r.target_host},
           {"submitted_at", r.submitted_at}};
}

void from_json(const json& j, MigrationRequest& r) {
  r.vm_id = j.at("vm_id").get<std::string>();
  r.source_host = j.at("source_host").get<std::string>();
  r.target_host = j.at("target_host").get<std::string>();
  r.submitted_at = j.at("submitted_at").get<double>();
}

void to_json(json& j, const Decision& d) {
  j = json{{"vm_id", d.vm_id},
           {"kind", to_string(d.kind)},
           {"submitted_at", d.submitted_at},
           {"scheduled_at", d.scheduled_at},
           {"reason", d.reason}};
}

void from_json(const json& j, Decision& d) {
  d.vm_id = j.at("vm_id").get<std::string>();
  d.kind = decision_kind_from_string(j.at("kind").get<std::string>());
  d.submitted_at = j.at("submitted_at").get<double>();
  d.scheduled_at = j.at("scheduled_at").get<double>();
  d.reason = j.at("reason").get<std::string>();
}

void to_json(json& j, const MigrationRecord& r) {
  j = json{{"request", r.request},
           {"decision", r.decision},
           {"executed", r.executed},
           {"class_at_request", to_string(r.class_at_request)}};
  if (r.executed) {
    j["executed_at"] = r.executed_at;
    j["class_at_execution"] = to_string(r.class_at_execution);
    j["outcome"] = r.outcome;
  }
}

void from_json(const json& j, MigrationRecord& r) {
  r.request = j.at("request").get<MigrationRequest>();
  r.decision = j.at("decision").get<Decision>();
  r.executed = j.at("executed").get<bool>();
  r.class_at_request = suitability_from_string(j.at("class_at_request").get<std::string>());
  if (r.executed) {
    r.executed_at = j.at("executed_at").get<double>();
    r.class_at_execution = suitability_from_string(j.at("class_at_execution").get<std::string>());
    r.outcome = j.at("outcome").get<MigrationOutcome>();
  }
}

void to_json(json& j, const VmTimeline& t) {
  std::string classes;
  classes.reserve(t.classes.size());
  for (auto c : t.classes) classes.push_back(c == Suitability::LM ? 'L' : 'N');
  j = json{{"vm_id", t.vm_id}, {"interval", t.interval}, {"classes", classes}};
}

void from_json(const json& j, VmTimeline& t) {
  t.vm_id = j.at("vm_id").get<std::string>();
  t.interval = j.at("interval").get<double>();
  t.classes.clear();
  for (char c : j.at("classes").get<std::string>()) {
    if (c != 'L' && c != 'N') throw Error("timeline classes must be L or N");
    t.classes.push_back(c == 'L' ? Suitability::LM : Suitability::NLM);
  }
}

void to_json(json& j, const ScenarioReport& r) {
  j = json{{"version", kReportVersion},
           {"scenario", r.scenario},
           {"mode", to_string(r.mode)},
           {"seed", r.seed},
           {"totals",
            {{"data_traffic", r.total_traffic},
             {"link_traffic", r.link_traffic},
             {"t_mig", r.total_t_mig},
             {"t_down", r.total_t_down},
             {"span_start", r.span_start},
             {"span_end", r.span_end}}},
           {"migrations", r.migrations},
           {"timelines", r.timelines}};
}

void from_json(const json& j, ScenarioReport& r) {
  if (j.at("version").get<int>() != kReportVersion) throw Error("unsupported report version");
  r.scenario = j.at("scenario").get<std::string>();
  r.mode = policy_mode_from_string(j.at("mode").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  const auto& t = j.at("totals");
  r.total_traffic = t.at("data_traffic").get<double>();
  r.link_traffic = t.at("link_traffic").get<double>();
  r.total_t_mig = t.at("t_mig").get<double>();
  r.total_t_down = t.at("t_down").get<double>();
  r.span_start = t.at("span_start").get<double>();
  r.span_end = t.at("span_end").get<double>();
  r.migrations = j.at("migrations").get<std::vector<MigrationRecord>>();
  r.timelines = j.at("timelines").get<std::vector<VmTimeline>>();
}

void to_json(json& j, const ReductionTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    json row{{"metric", r.metric},
             {"traditional", r.traditional},
             {"alma", r.alma}};
    row["vm_id"] = r.vm_id.empty() ? json(nullptr) : json(r.vm_id);
    row["reduction_pct"] = std::isnan(r.reduction_pct) ? json(nullptr) : json(r.reduction_pct);
    rows.push_back(row);
  }
  j = json{{"version", 1}, {"rows", rows}};
}

std::string dump_report(const ScenarioReport& report) { return json(report).dump(2) + "\n"; }

ScenarioReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open report " + path);
  try {
    return json::parse(in).get<ScenarioReport>();
  } catch (const json::exception& e) {
    throw Error("report " + path + ": " + e.what());
  }
}

}  // namespace alma
