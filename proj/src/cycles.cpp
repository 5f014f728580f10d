#include "alma/cycles.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>

#include "alma/error.hpp"

namespace alma {
namespace {

constexpr std::size_t kMinSamples = 8;

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> centered(std::span<const double> signal) {
  const double mean =
      std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(signal.size());
  std::vector<double> out(signal.begin(), signal.end());
  for (auto& v : out) v -= mean;
  return out;
}

// Fraction of the variance of x[0, m*p) explained by its folded cycle
// profile, minus the share expected from a profile of length p fit to noise.
double fold_score(const std::vector<double>& x, std::size_t p, std::vector<double>& profile) {
  const std::size_t m = x.size() / p;
  const std::size_t len = m * p;
  double mean = 0.0;
  for (std::size_t i = 0; i < len; ++i) mean += x[i];
  mean /= static_cast<double>(len);

  profile.assign(p, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double d = x[i] - mean;
    profile[i % p] += d;
    total += d * d;
  }
  if (!(total > 0.0)) return 0.0;
  double explained = 0.0;
  for (double v : profile) explained += v * v / static_cast<double>(m);
  const double raw = explained / total;
  const double bias = static_cast<double>(p) / static_cast<double>(len);
  return (raw - bias) / (1.0 - bias);
}

}  // namespace

std::vector<double> to_signal(const ClassificationSeries& classes) {
  std::vector<double> out;
  out.reserve(classes.size());
  for (auto c : classes.classes) out.push_back(c == Suitability::LM ? 1.0 : -1.0);
  return out;
}

std::vector<double> cpu_signal(const LoadSeries& series) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& s : series.samples) out.push_back(s.cpu);
  return out;
}

std::vector<double> magnitude_spectrum(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n == 0) return {};
  auto input = centered(signal);
  std::vector<fftw_complex> output(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), input.data(), output.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> mag(output.size());
  for (std::size_t k = 0; k < output.size(); ++k) mag[k] = std::hypot(output[k][0], output[k][1]);
  return mag;
}

CycleDetection detect_cycle_size(std::span<const double> signal, const CycleOptions& options) {
  const std::size_t n = signal.size();
  if (n < kMinSamples) {
    throw InsufficientDataError("cycle detection needs at least 8 samples, got " +
                                std::to_string(n));
  }
  const auto mag = magnitude_spectrum(signal);

  CycleDetection result;
  double sum = 0.0;
  std::size_t peak = 1;
  for (std::size_t k = 1; k < mag.size(); ++k) {
    sum += mag[k];
    if (mag[k] > mag[peak]) peak = k;
  }
  const double mean = sum / static_cast<double>(mag.size() - 1);
  result.peak_bin = peak;
  result.strength = mean > 0.0 ? mag[peak] / mean : 0.0;
  if (!(mean > 0.0) || result.strength < options.strength_threshold) return result;

  std::vector<std::size_t> bins(mag.size() - 1);
  std::iota(bins.begin(), bins.end(), std::size_t{1});
  std::stable_sort(bins.begin(), bins.end(),
                   [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });

  const std::size_t max_period = n / 2;
  std::set<std::size_t> candidates;
  for (std::size_t i = 0; i < std::min(options.candidate_peaks, bins.size()); ++i) {
    const std::size_t k = bins[i];
    if (mag[k] < options.candidate_peak_ratio * mag[peak]) break;
    const double nd = static_cast<double>(n);
    const auto lo = static_cast<std::size_t>(std::ceil(nd / static_cast<double>(k + 1)));
    const std::size_t hi =
        k > 1 ? static_cast<std::size_t>(std::floor(nd / static_cast<double>(k - 1))) : max_period;
    for (std::size_t p = std::max<std::size_t>(lo, 2); p <= std::min(hi, max_period); ++p) {
      candidates.insert(p);
    }
  }

  const auto x = centered(signal);
  std::vector<double> profile;
  double best_score = -HUGE_VAL;
  std::size_t best = 0;
  for (std::size_t p : candidates) {
    const double score = fold_score(x, p, profile);
    if (score > best_score + 1e-9) {
      best_score = score;
      best = p;
    }
  }
  if (best == 0) {
    best = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(
                                        static_cast<double>(n) / static_cast<double>(peak))));
  }
  result.cyclic = true;
  result.cycle_size = best;
  return result;
}

CycleDetection detect_cycle_size(const ClassificationSeries& classes,
                                 const CycleOptions& options) {
  const auto signal = to_signal(classes);
  return detect_cycle_size(std::span<const double>(signal), options);
}

bool CycleProfile::is_lm(std::size_t position) const {
  return std::binary_search(array_lm.begin(), array_lm.end(), position);
}

CycleProfile decompose(const ClassificationSeries& classes, std::size_t cycle_size,
                       double strength, DecomposeMode mode) {
  if (cycle_size == 0) throw Error("decompose: cycle size must be positive");
  if (classes.size() < cycle_size) {
    throw InsufficientDataError("decompose: series shorter than one cycle");
  }
  CycleProfile profile;
  profile.cycle_size = cycle_size;
  profile.dominant_period_strength = strength;

  const std::size_t cycles =
      mode == DecomposeMode::FirstCycle ? 1 : classes.size() / cycle_size;
  for (std::size_t i = 0; i < cycle_size; ++i) {
    std::size_t lm_votes = 0;
    for (std::size_t c = 0; c < cycles; ++c) {
      if (classes.classes[i + c * cycle_size] == Suitability::LM) ++lm_votes;
    }
    if (2 * lm_votes > cycles) {
      profile.array_lm.push_back(i);
    } else {
      profile.array_nlm.push_back(i);
    }
  }
  return profile;
}

std::optional<CycleProfile> analyze_cycles(const ClassificationSeries& classes,
                                           const CycleOptions& options, DecomposeMode mode) {
  const auto detection = detect_cycle_size(classes, options);
  if (!detection.cyclic) return std::nullopt;
  return decompose(classes, detection.cycle_size, detection.strength, mode);
}

const char* to_string(PostponeBasis basis) {
  switch (basis) {
    case PostponeBasis::AlreadyLM: return "already-LM";
    case PostponeBasis::WaitForLM: return "wait-for-LM";
    case PostponeBasis::NoLMInCycle: return "no-LM-in-cycle";
  }
  return "";
}

PostponeResult remaining_time(const CycleProfile& profile, std::size_t m_current) {
  if (profile.cycle_size == 0) throw Error("remaining_time: empty profile");
  PostponeResult result;
  result.m_relative = m_current % profile.cycle_size;
  if (profile.array_lm.empty()) {
    result.basis = PostponeBasis::NoLMInCycle;
    result.remain_time = profile.cycle_size;
    return result;
  }
  if (profile.is_lm(result.m_relative)) {
    result.basis = PostponeBasis::AlreadyLM;
    return result;
  }
  result.basis = PostponeBasis::WaitForLM;
  auto next = std::upper_bound(profile.array_lm.begin(), profile.array_lm.end(),
                               result.m_relative);
  if (next != profile.array_lm.end()) {
    result.remain_time = *next - result.m_relative;
  } else {
    result.remain_time = profile.cycle_size - result.m_relative + profile.array_lm.front();
  }
  return result;
}

}  // namespace alma
