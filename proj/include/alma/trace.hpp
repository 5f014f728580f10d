#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace alma {

/// Characterization interval used unless a scenario overrides it (seconds).
inline constexpr double kDefaultInterval = 15.0;

/// One observation of a VM's load indexes.
///   cpu, mem     percent in [0, 100]
///   dirty_rate   pages per second
///   io_rate      operations per second
struct LoadSample {
  double timestamp = 0.0;
  double cpu = 0.0;
  double mem = 0.0;
  double dirty_rate = 0.0;
  double io_rate = 0.0;

  bool operator==(const LoadSample&) const = default;
};

/// Time-ordered samples of a single VM.
struct LoadSeries {
  std::string vm_id;
  double interval = kDefaultInterval;
  std::vector<LoadSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  /// Timestamp one interval past the last sample; 0 for an empty series.
  double end_time() const noexcept;

  bool operator==(const LoadSeries&) const = default;
};

/// Throws RangeError (line 0) if a field is outside its valid range.
void validate_sample(const LoadSample& sample);

/// Reads `timestamp,cpu,mem,dirty_rate,io_rate` CSV. The interval is taken
/// from the first two timestamps when `interval` is not positive.
LoadSeries parse_trace(std::istream& input, std::string vm_id = {},
                       double interval = 0.0);
LoadSeries parse_trace_file(const std::string& path, std::string vm_id = {},
                            double interval = 0.0);

/// Writes the same CSV format with round-trip exact number formatting.
void write_trace(std::ostream& output, const LoadSeries& series);

/// Bucket means over [k*interval, (k+1)*interval); empty buckets repeat the
/// previous bucket.
LoadSeries resample(const LoadSeries& series, double interval);

enum class PhaseKind { Cpu, Mem, Io, Idle };

std::string to_string(PhaseKind kind);
PhaseKind phase_kind_from_string(const std::string& text);

/// Mean load levels held during a phase.
struct PhaseLevels {
  double cpu = 0.0;
  double mem = 0.0;
  double dirty_rate = 0.0;
  double io_rate = 0.0;
};

/// Default levels: MEM phases dirty memory heavily, IO phases drive the
/// disk, CPU and IDLE phases leave memory mostly untouched.
PhaseLevels default_levels(PhaseKind kind);

struct PhaseSpec {
  PhaseKind kind = PhaseKind::Idle;
  double duration = 0.0;
  PhaseLevels levels;

  PhaseSpec() = default;
  PhaseSpec(PhaseKind k, double seconds)
      : kind(k), duration(seconds), levels(default_levels(k)) {}
  PhaseSpec(PhaseKind k, double seconds, PhaseLevels custom)
      : kind(k), duration(seconds), levels(custom) {}
};

/// Builds a trace by repeating `phases` `repetitions` times and sampling
/// every `interval` seconds. Noise is multiplicative Gaussian with relative
/// standard deviation `noise`, clamped to the valid ranges.
LoadSeries synthesize(const std::vector<PhaseSpec>& phases, int repetitions,
                      double interval, double noise, std::uint64_t seed,
                      std::string vm_id = {});

/// Phase kind active at each sample of a noiseless synthesis with the same
/// arguments.
std::vector<PhaseKind> phase_timeline(const std::vector<PhaseSpec>& phases,
                                      int repetitions, double interval);

}  // namespace alma
