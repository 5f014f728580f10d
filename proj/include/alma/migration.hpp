#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "alma/trace.hpp"

namespace alma {

/// Pre-copy configuration. Sizes in MB, bandwidth in MB/s, page size in KB.
/// The defaults follow Xen's stop conditions.
struct MigrationParams {
  double v_mem = 1024.0;
  double bandwidth = 128.0;
  double page_size = 4.0;
  int max_rounds = 29;
  double dirty_page_threshold = 50.0;
  double transfer_cap_factor = 3.0;
  double activation_overhead = 0.2;

  void validate() const;
  double pages_to_mb(double pages) const { return pages * page_size / 1024.0; }
};

/// Analytic limits on migration time and downtime:
///   v_mem / B <= t_mig <= (M + 1) * v_mem / B,   0 <= t_down <= (M + 1) * v_mem / B
struct MigrationBounds {
  double lower_mig = 0.0;
  double upper_mig = 0.0;
  double upper_down = 0.0;
};

MigrationBounds bounds(const MigrationParams& params);

/// Bounds for a migration whose bandwidth varied over [min_bandwidth,
/// max_bandwidth]: the lower limit uses the fastest rate, the upper limits
/// the slowest.
MigrationBounds bounds(const MigrationParams& params, double min_bandwidth,
                       double max_bandwidth);

enum class StopReason { DirtyThreshold, MaxRounds, TransferCap };

std::string to_string(StopReason reason);
StopReason stop_reason_from_string(const std::string& text);

struct MigrationOutcome {
  double start_time = 0.0;
  double t_mig = 0.0;
  double t_down = 0.0;
  double transferred = 0.0;
  int rounds = 0;
  StopReason stop_reason = StopReason::DirtyThreshold;
  MigrationBounds bounds;
  /// Volume of each iterative round (MB); the stop-and-copy volume is
  /// `final_copy`.
  std::vector<double> round_volumes;
  double final_copy = 0.0;
};

/// Pages dirtied per second as a function of absolute time.
class DirtyRateProfile {
public:
  static DirtyRateProfile constant(double pages_per_second);
  /// rates[i] holds over [origin + i*step, origin + (i+1)*step). Times before
  /// the origin use rates[0]; times past the end repeat the last rate.
  static DirtyRateProfile steps(double origin, double step, std::vector<double> rates);
  static DirtyRateProfile from_series(const LoadSeries& series);
  /// Arbitrary rate function, integrated numerically.
  static DirtyRateProfile function(std::function<double(double)> rate);

  double rate_at(double t) const;
  /// Pages dirtied over [t0, t1].
  double integral(double t0, double t1) const;

private:
  enum class Kind { Constant, Steps, Function };
  Kind kind_ = Kind::Constant;
  double constant_ = 0.0;
  double origin_ = 0.0;
  double step_ = 1.0;
  std::vector<double> rates_;
  std::vector<double> cumulative_;  // pages dirtied over [origin, origin + i*step)
  std::function<double(double)> fn_;

  double steps_primitive(double t) const;
};

/// Fluid pre-copy state machine advanced in caller-chosen steps, so the
/// available bandwidth may change between steps.
///
/// Iterative rounds dirty pages in proportion to elapsed time; each round
/// resends what the previous one dirtied, capped at v_mem. After a round
/// the stop conditions are checked in the order dirty threshold, transfer
/// cap, round limit. Stop-and-copy then sends the pending pages with the
/// VM paused, followed by the fixed activation overhead.
class PrecopyProcess {
public:
  enum class Stage { Copying, StopAndCopy, Activation, Done };

  PrecopyProcess(const MigrationParams& params, double start_time);

  Stage stage() const noexcept { return stage_; }
  bool done() const noexcept { return stage_ == Stage::Done; }
  /// True while a copy is in flight (the link is in use).
  bool uses_link() const noexcept {
    return stage_ == Stage::Copying || stage_ == Stage::StopAndCopy;
  }
  double now() const noexcept { return now_; }
  const MigrationParams& params() const noexcept { return params_; }

  /// Time until the current stage ends at constant `bandwidth`.
  double time_to_stage_end(double bandwidth) const;

  /// Advances by `dt` <= time_to_stage_end(bandwidth). Returns the MB sent.
  double advance(double dt, double bandwidth, const DirtyRateProfile& dirty);

  /// Valid once done().
  MigrationOutcome outcome() const;

private:
  void finish_round();
  void enter_stop_and_copy(double pending, StopReason reason);

  MigrationParams params_;
  Stage stage_ = Stage::Copying;
  double start_ = 0.0;
  double now_ = 0.0;
  double remaining_ = 0.0;        // MB left in the current copy, or seconds of activation
  double dirty_pages_ = 0.0;      // dirtied since the current round began
  double transferred_ = 0.0;
  double stop_copy_started_ = 0.0;
  double min_bandwidth_ = HUGE_VAL;
  double max_bandwidth_ = 0.0;
  int rounds_ = 0;
  StopReason reason_ = StopReason::DirtyThreshold;
  std::vector<double> round_volumes_;
  double final_copy_ = 0.0;
  double t_down_ = 0.0;
};

/// Runs one migration at constant bandwidth `params.bandwidth`.
MigrationOutcome simulate_precopy(const MigrationParams& params,
                                  const DirtyRateProfile& dirty, double start_time = 0.0);

}  // namespace alma
