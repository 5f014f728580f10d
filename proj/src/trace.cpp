#include "alma/trace.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "alma/error.hpp"

namespace alma {
namespace {

constexpr std::array<const char*, 5> kColumns = {"timestamp", "cpu", "mem",
                                                 "dirty_rate", "io_rate"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, const char* column, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line) + ": cannot parse " + column +
                         " value '" + std::string(field) + "'",
                     line);
  }
  return value;
}

void check_range(double value, double lo, double hi, const char* field,
                 std::size_t line) {
  if (value < lo || value > hi) {
    std::ostringstream msg;
    if (line > 0) msg << "line " << line << ": ";
    msg << field << " = " << value << " outside [" << lo << ", " << hi << "]";
    throw RangeError(msg.str(), line);
  }
}

void validate_at(const LoadSample& s, std::size_t line) {
  constexpr double inf = HUGE_VAL;
  check_range(s.timestamp, 0.0, inf, "timestamp", line);
  check_range(s.cpu, 0.0, 100.0, "cpu", line);
  check_range(s.mem, 0.0, 100.0, "mem", line);
  check_range(s.dirty_rate, 0.0, inf, "dirty_rate", line);
  check_range(s.io_rate, 0.0, inf, "io_rate", line);
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

double clamp_noisy(double level, double noise, std::normal_distribution<double>& normal,
                   std::mt19937_64& rng, double hi) {
  if (noise == 0.0) return level;
  double v = level * (1.0 + noise * normal(rng));
  return std::clamp(v, 0.0, hi);
}

}  // namespace

double LoadSeries::end_time() const noexcept {
  return samples.empty() ? 0.0 : samples.back().timestamp + interval;
}

void validate_sample(const LoadSample& sample) { validate_at(sample, 0); }

LoadSeries parse_trace(std::istream& input, std::string vm_id, double interval) {
  LoadSeries series;
  series.vm_id = std::move(vm_id);

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(input, line)) {
    ++line_no;
    auto view = trim(line);
    if (view.empty()) continue;
    auto fields = split(view);
    if (!header_seen) {
      bool ok = fields.size() == kColumns.size();
      for (std::size_t i = 0; ok && i < kColumns.size(); ++i) ok = fields[i] == kColumns[i];
      if (!ok) {
        throw ParseError("line " + std::to_string(line_no) +
                             ": expected header timestamp,cpu,mem,dirty_rate,io_rate",
                         line_no);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != kColumns.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    LoadSample s;
    s.timestamp = parse_number(fields[0], kColumns[0], line_no);
    s.cpu = parse_number(fields[1], kColumns[1], line_no);
    s.mem = parse_number(fields[2], kColumns[2], line_no);
    s.dirty_rate = parse_number(fields[3], kColumns[3], line_no);
    s.io_rate = parse_number(fields[4], kColumns[4], line_no);
    validate_at(s, line_no);
    if (!series.samples.empty() && s.timestamp <= series.samples.back().timestamp) {
      throw OrderingError("line " + std::to_string(line_no) +
                              ": timestamp not strictly increasing",
                          line_no);
    }
    series.samples.push_back(s);
  }
  if (!header_seen) throw ParseError("missing header", 0);

  if (interval > 0.0) {
    series.interval = interval;
  } else if (series.samples.size() >= 2) {
    series.interval = series.samples[1].timestamp - series.samples[0].timestamp;
  } else {
    series.interval = kDefaultInterval;
  }
  return series;
}

LoadSeries parse_trace_file(const std::string& path, std::string vm_id, double interval) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file " + path);
  return parse_trace(in, std::move(vm_id), interval);
}

void write_trace(std::ostream& output, const LoadSeries& series) {
  output << "timestamp,cpu,mem,dirty_rate,io_rate\n";
  for (const auto& s : series.samples) {
    output << format_number(s.timestamp) << ',' << format_number(s.cpu) << ','
           << format_number(s.mem) << ',' << format_number(s.dirty_rate) << ','
           << format_number(s.io_rate) << '\n';
  }
}

LoadSeries resample(const LoadSeries& series, double interval) {
  if (!(interval > 0.0)) throw Error("resample interval must be positive");
  if (series.empty()) throw EmptyInputError("cannot resample an empty series");

  LoadSeries out;
  out.vm_id = series.vm_id;
  out.interval = interval;

  auto bucket_of = [interval](double t) {
    return static_cast<long long>(std::floor(t / interval));
  };
  const long long first = bucket_of(series.samples.front().timestamp);
  const long long last = bucket_of(series.samples.back().timestamp);
  out.samples.reserve(static_cast<std::size_t>(last - first + 1));

  std::size_t i = 0;
  LoadSample previous;
  for (long long k = first; k <= last; ++k) {
    LoadSample acc;
    std::size_t count = 0;
    while (i < series.samples.size() && bucket_of(series.samples[i].timestamp) == k) {
      const auto& s = series.samples[i];
      acc.cpu += s.cpu;
      acc.mem += s.mem;
      acc.dirty_rate += s.dirty_rate;
      acc.io_rate += s.io_rate;
      ++count;
      ++i;
    }
    LoadSample bucket = previous;
    if (count > 0) {
      const double n = static_cast<double>(count);
      bucket.cpu = acc.cpu / n;
      bucket.mem = acc.mem / n;
      bucket.dirty_rate = acc.dirty_rate / n;
      bucket.io_rate = acc.io_rate / n;
    }
    bucket.timestamp = static_cast<double>(k) * interval;
    out.samples.push_back(bucket);
    previous = bucket;
  }
  return out;
}

std::string to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::Cpu: return "CPU";
    case PhaseKind::Mem: return "MEM";
    case PhaseKind::Io: return "IO";
    case PhaseKind::Idle: return "IDLE";
  }
  return "IDLE";
}

PhaseKind phase_kind_from_string(const std::string& text) {
  if (text == "CPU") return PhaseKind::Cpu;
  if (text == "MEM") return PhaseKind::Mem;
  if (text == "IO" || text == "I/O") return PhaseKind::Io;
  if (text == "IDLE") return PhaseKind::Idle;
  throw Error("unknown phase kind '" + text + "'");
}

PhaseLevels default_levels(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::Cpu: return {95.0, 20.0, 50.0, 5.0};
    case PhaseKind::Mem: return {60.0, 70.0, 5000.0, 10.0};
    case PhaseKind::Io: return {30.0, 30.0, 200.0, 500.0};
    case PhaseKind::Idle: return {2.0, 5.0, 10.0, 1.0};
  }
  return {};
}

namespace {

void check_synthesis_args(const std::vector<PhaseSpec>& phases, int repetitions,
                          double interval) {
  if (phases.empty()) throw Error("synthesize: at least one phase required");
  if (repetitions < 1) throw Error("synthesize: repetitions must be >= 1");
  if (!(interval > 0.0)) throw Error("synthesize: interval must be positive");
  for (const auto& p : phases) {
    if (!(p.duration > 0.0)) throw Error("synthesize: phase duration must be positive");
  }
}

// Index of the phase active at offset t within one repetition.
std::size_t phase_at(const std::vector<PhaseSpec>& phases, double t) {
  double end = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    end += phases[i].duration;
    if (t < end) return i;
  }
  return phases.size() - 1;
}

double cycle_duration(const std::vector<PhaseSpec>& phases) {
  double total = 0.0;
  for (const auto& p : phases) total += p.duration;
  return total;
}

std::size_t sample_count(double total, double interval) {
  return static_cast<std::size_t>(std::ceil(total / interval - 1e-9));
}

}  // namespace

std::vector<PhaseKind> phase_timeline(const std::vector<PhaseSpec>& phases,
                                      int repetitions, double interval) {
  check_synthesis_args(phases, repetitions, interval);
  const double cycle = cycle_duration(phases);
  const std::size_t n = sample_count(cycle * repetitions, interval);
  std::vector<PhaseKind> kinds(n);
  for (std::size_t k = 0; k < n; ++k) {
    double t = static_cast<double>(k) * interval;
    kinds[k] = phases[phase_at(phases, std::fmod(t, cycle))].kind;
  }
  return kinds;
}

LoadSeries synthesize(const std::vector<PhaseSpec>& phases, int repetitions,
                      double interval, double noise, std::uint64_t seed,
                      std::string vm_id) {
  check_synthesis_args(phases, repetitions, interval);
  if (noise < 0.0 || noise > 0.5) throw Error("synthesize: noise must be in [0, 0.5]");

  LoadSeries series;
  series.vm_id = std::move(vm_id);
  series.interval = interval;

  const double cycle = cycle_duration(phases);
  const std::size_t n = sample_count(cycle * repetitions, interval);
  series.samples.reserve(n);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr double inf = HUGE_VAL;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * interval;
    const auto& level = phases[phase_at(phases, std::fmod(t, cycle))].levels;
    LoadSample s;
    s.timestamp = t;
    s.cpu = clamp_noisy(level.cpu, noise, normal, rng, 100.0);
    s.mem = clamp_noisy(level.mem, noise, normal, rng, 100.0);
    s.dirty_rate = clamp_noisy(level.dirty_rate, noise, normal, rng, inf);
    s.io_rate = clamp_noisy(level.io_rate, noise, normal, rng, inf);
    series.samples.push_back(s);
  }
  return series;
}

}  // namespace alma
