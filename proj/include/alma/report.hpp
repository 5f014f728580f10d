#pragma once

#include <string>
#include <vector>

#include "alma/orchestrator.hpp"

namespace alma {

/// One metric under both policies. reduction_pct = (traditional - alma) /
/// traditional * 100; NaN when traditional is zero and alma is not.
struct ReductionRow {
  std::string metric;
  std::string vm_id;  // empty for cluster rows
  double traditional = 0.0;
  double alma = 0.0;
  double reduction_pct = 0.0;
};

struct ReductionTable {
  std::vector<ReductionRow> rows;

  const ReductionRow* find(const std::string& metric, const std::string& vm_id = {}) const;
};

double reduction_percent(double baseline, double candidate);

/// Per-VM t_mig and t_down rows plus cluster rows for summed t_mig, summed
/// t_down and data traffic. Throws ComparisonError if the reports migrate
/// different VM sets or received requests at different times.
ReductionTable compare(const ScenarioReport& baseline, const ScenarioReport& candidate);

/// Fixed-width text rendering with two-decimal reductions.
std::string format_table(const ReductionTable& table);

/// CSV `time,workload_class,event` with one `none` row per sample and a
/// `requested` / `executed` row per migration event of `vm_id`.
std::string emit_cycle_diagram(const ScenarioReport& report, const std::string& vm_id);

}  // namespace alma
