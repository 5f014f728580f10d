#include "alma/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "alma/error.hpp"

namespace alma {
namespace {

struct VmTotals {
  double t_mig = 0.0;
  double t_down = 0.0;
  std::vector<double> submitted;
};

std::map<std::string, VmTotals> per_vm(const ScenarioReport& report) {
  std::map<std::string, VmTotals> out;
  for (const auto& m : report.migrations) {
    auto& v = out[m.request.vm_id];
    v.submitted.push_back(m.request.submitted_at);
    if (m.executed) {
      v.t_mig += m.outcome.t_mig;
      v.t_down += m.outcome.t_down;
    }
  }
  return out;
}

std::string number(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

const ReductionRow* ReductionTable::find(const std::string& metric,
                                         const std::string& vm_id) const {
  for (const auto& r : rows) {
    if (r.metric == metric && r.vm_id == vm_id) return &r;
  }
  return nullptr;
}

double reduction_percent(double baseline, double candidate) {
  if (baseline == 0.0) {
    return candidate == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return (baseline - candidate) / baseline * 100.0;
}

ReductionTable compare(const ScenarioReport& baseline, const ScenarioReport& candidate) {
  const auto base = per_vm(baseline);
  const auto cand = per_vm(candidate);

  std::set<std::string> base_ids, cand_ids;
  for (const auto& [id, _] : base) base_ids.insert(id);
  for (const auto& [id, _] : cand) cand_ids.insert(id);
  if (base_ids != cand_ids) throw ComparisonError("reports migrate different VM sets");
  for (const auto& [id, totals] : base) {
    if (totals.submitted != cand.at(id).submitted) {
      throw ComparisonError("VM " + id + " has different request times in the two reports");
    }
  }

  ReductionTable table;
  auto add = [&](std::string metric, std::string vm, double b, double c) {
    table.rows.push_back({std::move(metric), std::move(vm), b, c, reduction_percent(b, c)});
  };
  // Keep the VM order of the baseline report.
  std::vector<std::string> order;
  for (const auto& m : baseline.migrations) {
    if (std::find(order.begin(), order.end(), m.request.vm_id) == order.end()) {
      order.push_back(m.request.vm_id);
    }
  }
  for (const auto& id : order) add("t_down", id, base.at(id).t_down, cand.at(id).t_down);
  for (const auto& id : order) add("t_mig", id, base.at(id).t_mig, cand.at(id).t_mig);
  add("t_down_total", "", baseline.total_t_down, candidate.total_t_down);
  add("t_mig_total", "", baseline.total_t_mig, candidate.total_t_mig);
  add("data_traffic", "", baseline.total_traffic, candidate.total_traffic);
  return table;
}

std::string format_table(const ReductionTable& table) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %-16s %14s %14s %12s\n", "metric", "vm",
                "traditional", "alma", "reduction%");
  out << line;
  for (const auto& r : table.rows) {
    char pct[32];
    if (std::isnan(r.reduction_pct)) {
      std::snprintf(pct, sizeof pct, "n/a");
    } else {
      std::snprintf(pct, sizeof pct, "%.2f", r.reduction_pct);
    }
    std::snprintf(line, sizeof line, "%-14s %-16s %14.2f %14.2f %12s\n", r.metric.c_str(),
                  r.vm_id.empty() ? "(cluster)" : r.vm_id.c_str(), r.traditional, r.alma, pct);
    out << line;
  }
  return out.str();
}

std::string emit_cycle_diagram(const ScenarioReport& report, const std::string& vm_id) {
  const auto* timeline = report.timeline(vm_id);
  if (!timeline) throw Error("report has no timeline for VM " + vm_id);

  // (time, order, class, event); order puts sample rows before events at
  // the same instant and requests before executions.
  std::vector<std::tuple<double, int, Suitability, const char*>> rows;
  const auto class_at = [&](double t) {
    if (timeline->classes.empty()) return Suitability::NLM;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / timeline->interval + 1e-9)));
    return timeline->classes[std::min(k, timeline->classes.size() - 1)];
  };

  std::set<double> event_times;
  for (const auto& m : report.migrations) {
    if (m.request.vm_id != vm_id) continue;
    rows.emplace_back(m.request.submitted_at, 1, class_at(m.request.submitted_at), "requested");
    event_times.insert(m.request.submitted_at);
    if (m.executed) {
      rows.emplace_back(m.executed_at, 2, class_at(m.executed_at), "executed");
      event_times.insert(m.executed_at);
    }
  }
  for (std::size_t k = 0; k < timeline->classes.size(); ++k) {
    const double t = static_cast<double>(k) * timeline->interval;
    if (!event_times.count(t)) rows.emplace_back(t, 0, timeline->classes[k], "none");
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });

  std::ostringstream out;
  out << "time,workload_class,event\n";
  for (const auto& [t, order, cls, event] : rows) {
    out << number(t) << ',' << to_string(cls) << ',' << event << '\n';
  }
  return out.str();
}

}  // namespace alma
