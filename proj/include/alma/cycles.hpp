#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "alma/classifier.hpp"

namespace alma {

// All sample indexes in this module are 0-based: index 0 is the first
// sample of the series, and positions inside a cycle run over
// [0, cycle_size).

/// LM maps to +1 and NLM to -1.
std::vector<double> to_signal(const ClassificationSeries& classes);

/// CPU percentage of each sample, for detection over raw load.
std::vector<double> cpu_signal(const LoadSeries& series);

/// |X_k| for k in [0, n/2] of the real signal after removing its mean.
std::vector<double> magnitude_spectrum(std::span<const double> signal);

struct CycleOptions {
  /// Peak-to-mean spectral ratio below which the series is called acyclic.
  double strength_threshold = 4.0;
  /// Spectral peaks considered when forming candidate periods.
  std::size_t candidate_peaks = 3;
  /// A secondary peak joins the candidates when it reaches this fraction
  /// of the strongest peak.
  double candidate_peak_ratio = 0.3;
};

struct CycleDetection {
  bool cyclic = false;
  std::size_t cycle_size = 0;
  /// Peak non-DC magnitude over the mean non-DC magnitude.
  double strength = 0.0;
  /// Strongest non-DC frequency bin of the full-window spectrum.
  std::size_t peak_bin = 0;
};

/// Dominant period of `signal`, in samples.
///
/// The strongest spectral bins nominate candidate periods (every integer
/// period whose frequency falls between the neighbours of a peak bin). Each
/// candidate is scored on the window truncated to its largest whole number
/// of cycles by how much of the signal variance the folded cycle profile
/// explains, debiased for the profile length. The best-scoring candidate
/// wins; near-ties go to the shorter period. This keeps the result an exact
/// integer when the window does not hold a whole number of cycles.
///
/// Throws InsufficientDataError for fewer than 8 samples.
CycleDetection detect_cycle_size(std::span<const double> signal,
                                 const CycleOptions& options = {});
CycleDetection detect_cycle_size(const ClassificationSeries& classes,
                                 const CycleOptions& options = {});

/// One cycle split into LM and NLM positions.
struct CycleProfile {
  std::size_t cycle_size = 0;
  std::vector<std::size_t> array_lm;
  std::vector<std::size_t> array_nlm;
  double dominant_period_strength = 0.0;

  bool is_lm(std::size_t position) const;
};

enum class DecomposeMode {
  /// Reads classes[0, cycle_size) only.
  FirstCycle,
  /// Majority vote per position over every whole cycle in the window;
  /// ties vote NLM.
  MajorityVote,
};

/// Splits the positions of one cycle. Throws InsufficientDataError if the
/// series is shorter than `cycle_size`.
CycleProfile decompose(const ClassificationSeries& classes, std::size_t cycle_size,
                       double strength = 0.0,
                       DecomposeMode mode = DecomposeMode::FirstCycle);

/// detect_cycle_size followed by decompose; nullopt when acyclic.
std::optional<CycleProfile> analyze_cycles(const ClassificationSeries& classes,
                                           const CycleOptions& options = {},
                                           DecomposeMode mode = DecomposeMode::FirstCycle);

enum class PostponeBasis { AlreadyLM, WaitForLM, NoLMInCycle };

const char* to_string(PostponeBasis basis);

struct PostponeResult {
  std::size_t m_relative = 0;
  /// Samples until the next LM position; 0 iff basis is AlreadyLM. Set to
  /// cycle_size when the cycle has no LM position.
  std::size_t remain_time = 0;
  PostponeBasis basis = PostponeBasis::AlreadyLM;
};

/// Position of `m_current` inside the cycle and the wait until the next LM
/// position. When no LM position follows inside the cycle, the wait wraps
/// into the next cycle's first LM position.
PostponeResult remaining_time(const CycleProfile& profile, std::size_t m_current);

}  // namespace alma
