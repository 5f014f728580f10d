#include "alma/migration.hpp"

#include <algorithm>
#include <cmath>

#include "alma/error.hpp"

namespace alma {

void MigrationParams::validate() const {
  if (!(v_mem > 0.0) || !(bandwidth > 0.0) || !(page_size > 0.0) || max_rounds < 1 ||
      !(dirty_page_threshold > 0.0) || !(activation_overhead >= 0.0)) {
    throw ConfigurationError("migration parameters must be positive");
  }
  if (!(transfer_cap_factor >= 1.0)) {
    throw ConfigurationError("transfer_cap_factor must be >= 1");
  }
}

MigrationBounds bounds(const MigrationParams& params) {
  return bounds(params, params.bandwidth, params.bandwidth);
}

MigrationBounds bounds(const MigrationParams& params, double min_bandwidth,
                       double max_bandwidth) {
  const double copies = static_cast<double>(params.max_rounds + 1);
  MigrationBounds b;
  b.lower_mig = params.v_mem / max_bandwidth;
  b.upper_mig = copies * params.v_mem / min_bandwidth;
  b.upper_down = b.upper_mig;
  return b;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::DirtyThreshold: return "dirty-threshold";
    case StopReason::MaxRounds: return "max-rounds";
    case StopReason::TransferCap: return "transfer-cap";
  }
  return "";
}

StopReason stop_reason_from_string(const std::string& text) {
  if (text == "dirty-threshold") return StopReason::DirtyThreshold;
  if (text == "max-rounds") return StopReason::MaxRounds;
  if (text == "transfer-cap") return StopReason::TransferCap;
  throw Error("unknown stop reason '" + text + "'");
}

// ---------------------------------------------------------------------------

DirtyRateProfile DirtyRateProfile::constant(double pages_per_second) {
  DirtyRateProfile p;
  p.kind_ = Kind::Constant;
  p.constant_ = pages_per_second;
  return p;
}

DirtyRateProfile DirtyRateProfile::steps(double origin, double step, std::vector<double> rates) {
  if (rates.empty()) return constant(0.0);
  if (!(step > 0.0)) throw Error("dirty-rate step must be positive");
  DirtyRateProfile p;
  p.kind_ = Kind::Steps;
  p.origin_ = origin;
  p.step_ = step;
  p.rates_ = std::move(rates);
  p.cumulative_.resize(p.rates_.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.rates_.size(); ++i) {
    p.cumulative_[i + 1] = p.cumulative_[i] + p.rates_[i] * step;
  }
  return p;
}

DirtyRateProfile DirtyRateProfile::from_series(const LoadSeries& series) {
  std::vector<double> rates;
  rates.reserve(series.size());
  for (const auto& s : series.samples) rates.push_back(s.dirty_rate);
  const double origin = series.empty() ? 0.0 : series.samples.front().timestamp;
  return steps(origin, series.interval, std::move(rates));
}

DirtyRateProfile DirtyRateProfile::function(std::function<double(double)> rate) {
  DirtyRateProfile p;
  p.kind_ = Kind::Function;
  p.fn_ = std::move(rate);
  return p;
}

double DirtyRateProfile::rate_at(double t) const {
  switch (kind_) {
    case Kind::Constant: return constant_;
    case Kind::Function: return fn_(t);
    case Kind::Steps: {
      if (t < origin_) return rates_.front();
      auto i = static_cast<std::size_t>((t - origin_) / step_);
      return rates_[std::min(i, rates_.size() - 1)];
    }
  }
  return 0.0;
}

double DirtyRateProfile::steps_primitive(double t) const {
  if (t <= origin_) return (t - origin_) * rates_.front();
  const double offset = (t - origin_) / step_;
  const auto i = static_cast<std::size_t>(offset);
  if (i >= rates_.size()) {
    const double end = origin_ + step_ * static_cast<double>(rates_.size());
    return cumulative_.back() + (t - end) * rates_.back();
  }
  const double cell_start = origin_ + step_ * static_cast<double>(i);
  return cumulative_[i] + (t - cell_start) * rates_[i];
}

double DirtyRateProfile::integral(double t0, double t1) const {
  if (t1 <= t0) return 0.0;
  switch (kind_) {
    case Kind::Constant: return constant_ * (t1 - t0);
    case Kind::Steps: return steps_primitive(t1) - steps_primitive(t0);
    case Kind::Function: {
      // Composite Simpson.
      constexpr int kPanels = 64;
      const double h = (t1 - t0) / kPanels;
      double sum = fn_(t0) + fn_(t1);
      for (int i = 1; i < kPanels; ++i) sum += fn_(t0 + h * i) * (i % 2 ? 4.0 : 2.0);
      return sum * h / 3.0;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

PrecopyProcess::PrecopyProcess(const MigrationParams& params, double start_time)
    : params_(params), start_(start_time), now_(start_time), remaining_(params.v_mem) {
  params_.validate();
}

double PrecopyProcess::time_to_stage_end(double bandwidth) const {
  switch (stage_) {
    case Stage::Copying:
    case Stage::StopAndCopy: return remaining_ / bandwidth;
    case Stage::Activation: return remaining_;
    case Stage::Done: return HUGE_VAL;
  }
  return HUGE_VAL;
}

double PrecopyProcess::advance(double dt, double bandwidth, const DirtyRateProfile& dirty) {
  if (stage_ == Stage::Done) return 0.0;
  const double to_end = time_to_stage_end(bandwidth);
  const bool completes = dt >= to_end * (1.0 - 1e-12);
  if (completes) dt = to_end;

  double sent = 0.0;
  if (uses_link()) {
    min_bandwidth_ = std::min(min_bandwidth_, bandwidth);
    max_bandwidth_ = std::max(max_bandwidth_, bandwidth);
    sent = completes ? remaining_ : bandwidth * dt;
    remaining_ -= sent;
    transferred_ += sent;
    if (stage_ == Stage::Copying) dirty_pages_ += dirty.integral(now_, now_ + dt);
  } else {
    remaining_ -= dt;
  }
  now_ += dt;

  if (completes) {
    remaining_ = 0.0;
    switch (stage_) {
      case Stage::Copying: finish_round(); break;
      case Stage::StopAndCopy:
        stage_ = Stage::Activation;
        remaining_ = params_.activation_overhead;
        if (remaining_ == 0.0) stage_ = Stage::Done;
        break;
      case Stage::Activation: stage_ = Stage::Done; break;
      case Stage::Done: break;
    }
    if (stage_ == Stage::Done) t_down_ = now_ - stop_copy_started_;
  }
  return sent;
}

void PrecopyProcess::finish_round() {
  ++rounds_;
  const double max_pages = params_.v_mem * 1024.0 / params_.page_size;
  const double pages = std::min(dirty_pages_, max_pages);
  const double pending = params_.pages_to_mb(pages);
  dirty_pages_ = 0.0;

  if (pages < params_.dirty_page_threshold) {
    enter_stop_and_copy(pending, StopReason::DirtyThreshold);
  } else if (transferred_ > params_.transfer_cap_factor * params_.v_mem) {
    enter_stop_and_copy(pending, StopReason::TransferCap);
  } else if (rounds_ >= params_.max_rounds) {
    enter_stop_and_copy(pending, StopReason::MaxRounds);
  } else {
    remaining_ = pending;
    round_volumes_.push_back(pending);
  }
}

void PrecopyProcess::enter_stop_and_copy(double pending, StopReason reason) {
  reason_ = reason;
  final_copy_ = pending;
  stop_copy_started_ = now_;
  remaining_ = pending;
  stage_ = Stage::StopAndCopy;
  if (pending == 0.0) {
    stage_ = Stage::Activation;
    remaining_ = params_.activation_overhead;
    if (remaining_ == 0.0) stage_ = Stage::Done;
  }
}

MigrationOutcome PrecopyProcess::outcome() const {
  if (stage_ != Stage::Done) throw Error("migration still in progress");
  MigrationOutcome out;
  out.start_time = start_;
  out.t_mig = now_ - start_;
  out.t_down = t_down_;
  out.transferred = transferred_;
  out.rounds = rounds_;
  out.stop_reason = reason_;
  out.bounds = bounds(params_, min_bandwidth_, max_bandwidth_);
  out.round_volumes.reserve(round_volumes_.size() + 1);
  out.round_volumes.push_back(params_.v_mem);
  out.round_volumes.insert(out.round_volumes.end(), round_volumes_.begin(), round_volumes_.end());
  out.final_copy = final_copy_;
  return out;
}

MigrationOutcome simulate_precopy(const MigrationParams& params, const DirtyRateProfile& dirty,
                                  double start_time) {
  PrecopyProcess process(params, start_time);
  while (!process.done()) {
    process.advance(process.time_to_stage_end(params.bandwidth), params.bandwidth, dirty);
  }
  return process.outcome();
}

}  // namespace alma
