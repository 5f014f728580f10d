#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "alma/trace.hpp"

namespace alma {

/// Whether a moment is suitable (LM) or unsuitable (NLM) for live migration.
enum class Suitability { LM, NLM };

std::string to_string(Suitability s);
Suitability suitability_from_string(const std::string& text);

/// Load indexes fed to the classifier, in feature order.
enum Feature : std::size_t { kCpu = 0, kMem = 1, kDirty = 2, kIo = 3 };
inline constexpr std::size_t kFeatureCount = 4;

using BinEdges = std::array<std::vector<double>, kFeatureCount>;

struct FeatureVector {
  std::array<std::size_t, kFeatureCount> bins{};
  bool operator==(const FeatureVector&) const = default;
};

/// Bin index per feature = number of edges strictly below the value.
FeatureVector discretize(const LoadSample& sample, const BinEdges& edges);

/// Ground-truth labelling for training corpora. Memory dirtying dominates
/// migration cost; heavy I/O is also treated as unsuitable.
struct LabelRule {
  double max_dirty_rate = 500.0;
  double max_cpu = 100.0;
  double max_io_rate = 100.0;

  Suitability operator()(const LoadSample& s) const {
    return (s.dirty_rate <= max_dirty_rate && s.cpu <= max_cpu && s.io_rate <= max_io_rate)
               ? Suitability::LM
               : Suitability::NLM;
  }
};

enum class ClassifierMode { Binary, FourClass };

/// Categorical Naive Bayes over discretized load indexes.
///
/// Binary mode has classes {LM, NLM}. Four-class mode has {CPU, MEM, IO,
/// IDLE} and maps each onto a suitability through `suitability`.
/// Probabilities are stored linearly; scoring happens in the log domain.
struct NBModel {
  ClassifierMode mode = ClassifierMode::Binary;
  std::vector<std::string> class_names;
  std::vector<Suitability> suitability;
  std::size_t bins = 10;
  double alpha = 1.0;
  std::vector<double> priors;
  BinEdges edges;
  /// likelihoods[class][feature][bin]
  std::vector<std::array<std::vector<double>, kFeatureCount>> likelihoods;

  std::size_t class_count() const noexcept { return priors.size(); }
  /// Throws Error when priors or likelihood rows do not sum to one, or any
  /// probability is zero.
  void check_invariants() const;
};

using LabeledSample = std::pair<LoadSample, Suitability>;
using KindLabeledSample = std::pair<LoadSample, PhaseKind>;

/// Equal-width edges over the observed range of each feature.
BinEdges equal_width_edges(std::span<const LoadSample> samples, std::size_t bins);

NBModel train(std::span<const LabeledSample> labeled, std::size_t bins = 10,
              double alpha = 1.0);
NBModel train_four_class(std::span<const KindLabeledSample> labeled,
                         std::size_t bins = 10, double alpha = 1.0);

struct Prediction {
  std::size_t class_index = 0;
  Suitability workload_class = Suitability::NLM;
  double posterior = 0.0;
};

/// Normalized posterior of every class.
std::vector<double> posteriors(const NBModel& model, const LoadSample& sample);

/// Argmax class. Exact ties resolve toward a class mapped to NLM.
Prediction classify(const NBModel& model, const LoadSample& sample);

struct ClassificationSeries {
  std::string vm_id;
  double interval = kDefaultInterval;
  std::vector<Suitability> classes;
  std::vector<double> posteriors;

  std::size_t size() const noexcept { return classes.size(); }
  bool empty() const noexcept { return classes.empty(); }
  /// First `n` entries.
  ClassificationSeries prefix(std::size_t n) const;
};

ClassificationSeries classify_series(const NBModel& model, const LoadSeries& series);

/// Samples of every phase kind, labelled by `rule`. Deterministic in `seed`.
std::vector<LabeledSample> default_training_corpus(std::uint64_t seed,
                                                   std::size_t per_kind = 500,
                                                   double noise = 0.1,
                                                   const LabelRule& rule = {});
std::vector<KindLabeledSample> default_kind_corpus(std::uint64_t seed,
                                                   std::size_t per_kind = 500,
                                                   double noise = 0.1);

/// Binary model trained on default_training_corpus(seed).
NBModel default_model(std::uint64_t seed = 7);

}  // namespace alma
