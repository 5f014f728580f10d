#include "alma/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "alma/error.hpp"

namespace alma {
namespace {

constexpr double kSumTolerance = 1e-9;

double feature_value(const LoadSample& s, std::size_t f) {
  switch (f) {
    case kCpu: return s.cpu;
    case kMem: return s.mem;
    case kDirty: return s.dirty_rate;
    default: return s.io_rate;
  }
}

NBModel train_indexed(std::span<const LoadSample> samples,
                      std::span<const std::size_t> labels, std::size_t k,
                      std::size_t bins, double alpha) {
  if (bins < 2) throw TrainingError("bins must be >= 2");
  if (!(alpha > 0.0)) throw TrainingError("smoothing alpha must be positive");

  std::vector<std::size_t> class_counts(k, 0);
  for (auto label : labels) ++class_counts[label];
  for (std::size_t c = 0; c < k; ++c) {
    if (class_counts[c] == 0) {
      throw TrainingError("training data has no sample of class " + std::to_string(c));
    }
  }

  NBModel model;
  model.bins = bins;
  model.alpha = alpha;
  model.edges = equal_width_edges(samples, bins);

  const double n = static_cast<double>(samples.size());
  const double kd = static_cast<double>(k);
  model.priors.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    model.priors[c] = (static_cast<double>(class_counts[c]) + alpha) / (n + alpha * kd);
  }

  std::vector<std::array<std::vector<double>, kFeatureCount>> counts(k);
  for (auto& per_class : counts) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      per_class[f].assign(model.edges[f].size() + 1, 0.0);
    }
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto fv = discretize(samples[i], model.edges);
    for (std::size_t f = 0; f < kFeatureCount; ++f) counts[labels[i]][f][fv.bins[f]] += 1.0;
  }

  model.likelihoods = counts;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      auto& row = model.likelihoods[c][f];
      const double denom =
          static_cast<double>(class_counts[c]) + alpha * static_cast<double>(row.size());
      for (auto& v : row) v = (v + alpha) / denom;
    }
  }
  return model;
}

std::vector<double> log_scores(const NBModel& model, const LoadSample& sample) {
  const auto fv = discretize(sample, model.edges);
  std::vector<double> scores(model.class_count());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    double s = std::log(model.priors[c]);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      s += std::log(model.likelihoods[c][f][fv.bins[f]]);
    }
    scores[c] = s;
  }
  return scores;
}

std::vector<double> normalize(const std::vector<double>& scores) {
  const double peak = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    out[c] = std::exp(scores[c] - peak);
    total += out[c];
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace

std::string to_string(Suitability s) { return s == Suitability::LM ? "LM" : "NLM"; }

Suitability suitability_from_string(const std::string& text) {
  if (text == "LM") return Suitability::LM;
  if (text == "NLM") return Suitability::NLM;
  throw Error("unknown workload class '" + text + "'");
}

FeatureVector discretize(const LoadSample& sample, const BinEdges& edges) {
  FeatureVector fv;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const auto& e = edges[f];
    const double v = feature_value(sample, f);
    fv.bins[f] = static_cast<std::size_t>(std::lower_bound(e.begin(), e.end(), v) - e.begin());
  }
  return fv;
}

BinEdges equal_width_edges(std::span<const LoadSample> samples, std::size_t bins) {
  BinEdges edges;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : samples) {
      lo = std::min(lo, feature_value(s, f));
      hi = std::max(hi, feature_value(s, f));
    }
    if (samples.empty()) lo = hi = 0.0;
    double width = (hi - lo) / static_cast<double>(bins);
    if (!(width > 0.0)) width = 1.0;  // constant feature
    edges[f].resize(bins - 1);
    for (std::size_t j = 1; j < bins; ++j) edges[f][j - 1] = lo + width * static_cast<double>(j);
  }
  return edges;
}

void NBModel::check_invariants() const {
  if (priors.size() != class_names.size() || priors.size() != suitability.size() ||
      priors.size() != likelihoods.size()) {
    throw Error("model: inconsistent class count");
  }
  double total = 0.0;
  for (double p : priors) {
    if (!(p > 0.0)) throw Error("model: zero prior");
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) throw Error("model: priors do not sum to 1");
  for (const auto& per_class : likelihoods) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const auto& row = per_class[f];
      if (row.size() != edges[f].size() + 1) throw Error("model: likelihood row size mismatch");
      double sum = 0.0;
      for (double v : row) {
        if (!(v > 0.0)) throw Error("model: zero likelihood");
        sum += v;
      }
      if (std::abs(sum - 1.0) > kSumTolerance) throw Error("model: likelihood row does not sum to 1");
    }
  }
  for (const auto& e : edges) {
    if (std::adjacent_find(e.begin(), e.end(), std::greater_equal<>()) != e.end()) {
      throw Error("model: edges not strictly increasing");
    }
  }
}

NBModel train(std::span<const LabeledSample> labeled, std::size_t bins, double alpha) {
  std::vector<LoadSample> samples;
  std::vector<std::size_t> labels;
  samples.reserve(labeled.size());
  labels.reserve(labeled.size());
  for (const auto& [s, c] : labeled) {
    samples.push_back(s);
    labels.push_back(c == Suitability::LM ? 0 : 1);
  }
  NBModel model = train_indexed(samples, labels, 2, bins, alpha);
  model.mode = ClassifierMode::Binary;
  model.class_names = {"LM", "NLM"};
  model.suitability = {Suitability::LM, Suitability::NLM};
  return model;
}

NBModel train_four_class(std::span<const KindLabeledSample> labeled, std::size_t bins,
                         double alpha) {
  std::vector<LoadSample> samples;
  std::vector<std::size_t> labels;
  for (const auto& [s, kind] : labeled) {
    samples.push_back(s);
    labels.push_back(static_cast<std::size_t>(kind));
  }
  NBModel model = train_indexed(samples, labels, 4, bins, alpha);
  model.mode = ClassifierMode::FourClass;
  // PhaseKind order: Cpu, Mem, Io, Idle.
  model.class_names = {"CPU", "MEM", "IO", "IDLE"};
  model.suitability = {Suitability::LM, Suitability::NLM, Suitability::NLM, Suitability::LM};
  return model;
}

std::vector<double> posteriors(const NBModel& model, const LoadSample& sample) {
  return normalize(log_scores(model, sample));
}

Prediction classify(const NBModel& model, const LoadSample& sample) {
  const auto scores = log_scores(model, sample);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best] ||
        (scores[c] == scores[best] && model.suitability[c] == Suitability::NLM)) {
      best = c;
    }
  }
  const auto post = normalize(scores);
  return {best, model.suitability[best], post[best]};
}

ClassificationSeries ClassificationSeries::prefix(std::size_t n) const {
  ClassificationSeries out;
  out.vm_id = vm_id;
  out.interval = interval;
  n = std::min(n, classes.size());
  out.classes.assign(classes.begin(), classes.begin() + static_cast<std::ptrdiff_t>(n));
  out.posteriors.assign(posteriors.begin(), posteriors.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

ClassificationSeries classify_series(const NBModel& model, const LoadSeries& series) {
  ClassificationSeries out;
  out.vm_id = series.vm_id;
  out.interval = series.interval;
  out.classes.reserve(series.size());
  out.posteriors.reserve(series.size());
  for (const auto& s : series.samples) {
    auto p = classify(model, s);
    out.classes.push_back(p.workload_class);
    out.posteriors.push_back(p.posterior);
  }
  return out;
}

namespace {

template <typename Label, typename LabelFn>
std::vector<std::pair<LoadSample, Label>> corpus(std::uint64_t seed, std::size_t per_kind,
                                                 double noise, LabelFn&& label) {
  std::vector<std::pair<LoadSample, Label>> out;
  const PhaseKind kinds[] = {PhaseKind::Cpu, PhaseKind::Mem, PhaseKind::Io, PhaseKind::Idle};
  std::uint64_t k = 0;
  for (auto kind : kinds) {
    auto series = synthesize({PhaseSpec(kind, static_cast<double>(per_kind))}, 1, 1.0, noise,
                             seed * 31 + k++);
    for (const auto& s : series.samples) out.emplace_back(s, label(s, kind));
  }
  return out;
}

}  // namespace

std::vector<LabeledSample> default_training_corpus(std::uint64_t seed, std::size_t per_kind,
                                                   double noise, const LabelRule& rule) {
  return corpus<Suitability>(seed, per_kind, noise,
                             [&](const LoadSample& s, PhaseKind) { return rule(s); });
}

std::vector<KindLabeledSample> default_kind_corpus(std::uint64_t seed, std::size_t per_kind,
                                                   double noise) {
  return corpus<PhaseKind>(seed, per_kind, noise,
                           [](const LoadSample&, PhaseKind kind) { return kind; });
}

NBModel default_model(std::uint64_t seed) {
  auto data = default_training_corpus(seed);
  return train(data);
}

}  // namespace alma
