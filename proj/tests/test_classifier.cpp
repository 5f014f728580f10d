#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <json.hpp>

#include "alma/classifier.hpp"
#include "alma/error.hpp"
#include "alma/serialize.hpp"
#include "alma/trace.hpp"

using namespace alma;

namespace {

BinEdges ten_bins_0_100() {
  BinEdges e;
  for (auto& f : e) {
    for (int k = 1; k < 10; ++k) f.push_back(10.0 * k);
  }
  return e;
}

std::vector<LabeledSample> from_kind(PhaseKind kind, Suitability label, std::size_t n,
                                     std::uint64_t seed) {
  auto s = synthesize({{kind, static_cast<double>(n)}}, 1, 1.0, 0.1, seed);
  std::vector<LabeledSample> out;
  for (const auto& x : s.samples) out.emplace_back(x, label);
  return out;
}

double seconds_to_classify(const NBModel& model, const LoadSeries& series) {
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    auto out = classify_series(model, series);
    const auto t1 = std::chrono::steady_clock::now();
    REQUIRE(out.size() == series.size());
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

TEST_CASE("discretize counts edges strictly below the value") {
  const auto edges = ten_bins_0_100();
  CHECK(discretize({0, 0, 0, 0, 0}, edges).bins[kCpu] == 0);
  CHECK(discretize({0, 100, 0, 0, 0}, edges).bins[kCpu] == 9);
  CHECK(discretize({0, 10, 0, 0, 0}, edges).bins[kCpu] == 0);
  CHECK(discretize({0, 10.5, 0, 0, 0}, edges).bins[kCpu] == 1);

  BinEdges dirty;
  dirty[kDirty] = {100.0, 1000.0};
  CHECK(discretize({0, 0, 0, 5000, 0}, dirty).bins[kDirty] == 2);
  CHECK(discretize({0, 0, 0, 500, 0}, dirty).bins[kDirty] == 1);
}

TEST_CASE("equal-width edges over the observed range") {
  std::vector<LoadSample> s{{0, 0, 5, 0, 0}, {0, 100, 5, 0, 0}};
  auto e = equal_width_edges(s, 10);
  REQUIRE(e[kCpu].size() == 9);
  CHECK(e[kCpu][0] == doctest::Approx(10.0));
  CHECK(e[kCpu][8] == doctest::Approx(90.0));
  CHECK(std::is_sorted(e[kMem].begin(), e[kMem].end()));
  CHECK(std::adjacent_find(e[kMem].begin(), e[kMem].end()) == e[kMem].end());
}

TEST_CASE("one sample per class gives even priors") {
  std::vector<LabeledSample> data{{{0, 10, 10, 10, 10}, Suitability::LM},
                                  {{0, 10, 10, 10, 10}, Suitability::NLM}};
  auto m = train(data);
  CHECK(m.priors[0] == doctest::Approx(0.5));
  CHECK(m.priors[1] == doctest::Approx(0.5));
  CHECK_NOTHROW(m.check_invariants());
}

TEST_CASE("training without both classes fails") {
  std::vector<LabeledSample> data{{{0, 1, 1, 1, 1}, Suitability::LM},
                                  {{0, 2, 2, 2, 2}, Suitability::LM}};
  CHECK_THROWS_AS(train(data), TrainingError);
  CHECK_THROWS_AS(train(std::vector<LabeledSample>{}), TrainingError);
}

TEST_CASE("Laplace prior for 100 LM and 300 NLM") {
  auto data = from_kind(PhaseKind::Idle, Suitability::LM, 100, 1);
  auto nlm = from_kind(PhaseKind::Mem, Suitability::NLM, 300, 2);
  data.insert(data.end(), nlm.begin(), nlm.end());
  auto m = train(data, 10, 1.0);
  CHECK(m.priors[0] == doctest::Approx(101.0 / 402.0).epsilon(1e-12));
  CHECK(m.priors[1] == doctest::Approx(301.0 / 402.0).epsilon(1e-12));
  CHECK_NOTHROW(m.check_invariants());
}

TEST_CASE("likelihood tables are smoothed and normalized") {
  auto m = default_model();
  CHECK_NOTHROW(m.check_invariants());
  for (const auto& cls : m.likelihoods) {
    for (const auto& row : cls) {
      double sum = 0;
      for (double v : row) {
        CHECK(v > 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("a two-exemplar model recognizes its LM exemplar") {
  LoadSample lm{0, 5, 5, 10, 1}, nlm{0, 90, 80, 9000, 400};
  std::vector<LabeledSample> data{{lm, Suitability::LM}, {nlm, Suitability::NLM}};
  auto m = train(data);
  auto p = classify(m, lm);
  CHECK(p.workload_class == Suitability::LM);
  CHECK(p.posterior > 0.5);
  CHECK(classify(m, nlm).workload_class == Suitability::NLM);
}

TEST_CASE("identical tables with even priors tie to NLM at exactly one half") {
  NBModel m;
  m.class_names = {"LM", "NLM"};
  m.suitability = {Suitability::LM, Suitability::NLM};
  m.priors = {0.5, 0.5};
  m.edges = ten_bins_0_100();
  m.likelihoods.resize(2);
  for (auto& cls : m.likelihoods) {
    for (auto& row : cls) row.assign(10, 0.1);
  }
  auto p = classify(m, {0, 42, 17, 3, 99});
  CHECK(p.workload_class == Suitability::NLM);
  CHECK(p.posterior == 0.5);
}

TEST_CASE("held-out accuracy on IDLE versus MEM profiles") {
  auto data = from_kind(PhaseKind::Idle, Suitability::LM, 1000, 21);
  auto nlm = from_kind(PhaseKind::Mem, Suitability::NLM, 1000, 22);
  data.insert(data.end(), nlm.begin(), nlm.end());
  std::mt19937_64 rng(5);
  std::shuffle(data.begin(), data.end(), rng);
  const std::size_t cut = data.size() * 8 / 10;
  auto m = train(std::span<const LabeledSample>(data.data(), cut));
  std::size_t right = 0;
  for (std::size_t i = cut; i < data.size(); ++i) {
    right += classify(m, data[i].first).workload_class == data[i].second ? 1 : 0;
  }
  CHECK(static_cast<double>(right) / static_cast<double>(data.size() - cut) >= 0.99);
}

TEST_CASE("classify_series on empty and idle series") {
  const auto m = default_model();
  LoadSeries empty{"vm", 15.0, {}};
  CHECK(classify_series(m, empty).empty());

  auto idle = synthesize({{PhaseKind::Idle, 3000}}, 1, 15.0, 0.1, 4);
  auto cs = classify_series(m, idle);
  REQUIRE(cs.size() == idle.size());
  for (auto c : cs.classes) CHECK(c == Suitability::LM);
}

TEST_CASE("alternating MEM and IDLE phases give alternating blocks") {
  const auto m = default_model();
  std::vector<PhaseSpec> phases{{PhaseKind::Mem, 150}, {PhaseKind::Idle, 150}};
  auto s = synthesize(phases, 6, 15.0, 0.1, 9);
  auto kinds = phase_timeline(phases, 6, 15.0);
  auto cs = classify_series(m, s);
  for (std::size_t block = 0; block < kinds.size() / 10; ++block) {
    std::size_t lm = 0;
    for (std::size_t i = block * 10; i < block * 10 + 10; ++i) {
      lm += cs.classes[i] == Suitability::LM ? 1 : 0;
    }
    const bool expect_lm = kinds[block * 10] == PhaseKind::Idle;
    CHECK((lm > 5) == expect_lm);
  }
}

TEST_CASE("posteriors sum to one on every sample") {
  const auto m = default_model();
  auto s = synthesize({{PhaseKind::Cpu, 300}, {PhaseKind::Mem, 300}, {PhaseKind::Io, 300},
                       {PhaseKind::Idle, 300}},
                      3, 1.0, 0.5, 17);
  for (const auto& x : s.samples) {
    const auto p = posteriors(m, x);
    double sum = 0;
    for (double v : p) sum += v;
    REQUIRE(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("scaling every likelihood by one constant keeps the argmax") {
  const auto m = default_model();
  auto scaled = m;
  for (auto& cls : scaled.likelihoods) {
    for (auto& row : cls) {
      for (auto& v : row) v *= 1e-3;
    }
  }
  auto s = synthesize({{PhaseKind::Cpu, 200}, {PhaseKind::Mem, 200}, {PhaseKind::Io, 200}}, 2,
                      1.0, 0.3, 3);
  for (const auto& x : s.samples) {
    REQUIRE(classify(m, x).class_index == classify(scaled, x).class_index);
  }
}

TEST_CASE("samples accepted by the labelling rule classify LM") {
  const auto m = default_model();
  const LabelRule rule;
  std::size_t eligible = 0, lm = 0;
  for (auto kind : {PhaseKind::Cpu, PhaseKind::Mem, PhaseKind::Io, PhaseKind::Idle}) {
    auto s = synthesize({{kind, 2000}}, 1, 1.0, 0.1, 100 + static_cast<int>(kind));
    for (const auto& x : s.samples) {
      if (rule(x) != Suitability::LM) continue;
      ++eligible;
      lm += classify(m, x).workload_class == Suitability::LM ? 1 : 0;
    }
  }
  REQUIRE(eligible > 1000);
  CHECK(static_cast<double>(lm) / static_cast<double>(eligible) >= 0.95);
}

TEST_CASE("classification cost grows linearly") {
  const auto m = default_model();
  auto small = synthesize({{PhaseKind::Mem, 100}, {PhaseKind::Idle, 100}}, 500, 1.0, 0.1, 1);
  auto large = synthesize({{PhaseKind::Mem, 100}, {PhaseKind::Idle, 100}}, 1000, 1.0, 0.1, 1);
  const double a = seconds_to_classify(m, small);
  const double b = seconds_to_classify(m, large);
  CHECK(b / a < 2.5);
}

TEST_CASE("four-class mode maps phase kinds to workload classes") {
  auto corpus = default_kind_corpus(3);
  auto m = train_four_class(corpus);
  CHECK(m.mode == ClassifierMode::FourClass);
  CHECK_NOTHROW(m.check_invariants());
  auto check_kind = [&](PhaseKind kind, Suitability expect) {
    const auto lv = default_levels(kind);
    auto p = classify(m, {0, lv.cpu, lv.mem, lv.dirty_rate, lv.io_rate});
    CHECK(m.class_names[p.class_index] == to_string(kind));
    CHECK(p.workload_class == expect);
  };
  check_kind(PhaseKind::Cpu, Suitability::LM);
  check_kind(PhaseKind::Idle, Suitability::LM);
  check_kind(PhaseKind::Mem, Suitability::NLM);
  check_kind(PhaseKind::Io, Suitability::NLM);
}

TEST_CASE("model JSON round trip preserves every table") {
  const auto m = default_model(11);
  nlohmann::json j = m;
  auto back = j.get<NBModel>();
  CHECK(back.priors == m.priors);
  CHECK(back.edges == m.edges);
  CHECK(back.likelihoods == m.likelihoods);
  CHECK(back.class_names == m.class_names);
  CHECK(nlohmann::json(back).dump() == j.dump());

  j["priors"][0] = 0.0;
  CHECK_THROWS(j.get<NBModel>());
}
