#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "alma/classifier.hpp"
#include "alma/cycles.hpp"
#include "alma/error.hpp"
#include "alma/trace.hpp"
#include "oracles.hpp"

using namespace alma;

namespace {

ClassificationSeries series_of(const std::vector<int>& labels) {
  ClassificationSeries cs;
  cs.vm_id = "vm";
  cs.interval = 15.0;
  for (int v : labels) {
    cs.classes.push_back(v > 0 ? Suitability::LM : Suitability::NLM);
    cs.posteriors.push_back(1.0);
  }
  return cs;
}

ClassificationSeries series_of(const std::string& pattern) {
  std::vector<int> labels;
  for (char c : pattern) labels.push_back(c == 'L' ? 1 : -1);
  return series_of(labels);
}

std::vector<int> square(std::size_t period, std::size_t lm_run, std::size_t n) {
  std::vector<int> one(period, -1);
  for (std::size_t i = 0; i < lm_run; ++i) one[i] = 1;
  return oracle::tile(one, n);
}

void flip_some(std::vector<int>& x, double rate, std::mt19937_64& rng) {
  std::bernoulli_distribution flip(rate);
  for (auto& v : x) {
    if (flip(rng)) v = -v;
  }
}

CycleProfile profile_of(std::size_t cycle, const std::vector<std::size_t>& lm) {
  CycleProfile p;
  p.cycle_size = cycle;
  for (std::size_t i = 0; i < cycle; ++i) {
    if (std::find(lm.begin(), lm.end(), i) != lm.end()) p.array_lm.push_back(i);
    else p.array_nlm.push_back(i);
  }
  return p;
}

}  // namespace

TEST_CASE("square wave of period 20 over 200 samples") {
  auto d = detect_cycle_size(series_of(square(20, 10, 200)));
  CHECK(d.cyclic);
  CHECK(d.cycle_size == 20);
  CHECK(d.peak_bin == 10);
  CHECK(d.strength >= 4.0);
}

TEST_CASE("a constant series is acyclic") {
  auto d = detect_cycle_size(series_of(std::vector<int>(200, 1)));
  CHECK_FALSE(d.cyclic);
  CHECK_FALSE(analyze_cycles(series_of(std::vector<int>(200, 1))).has_value());
}

TEST_CASE("random labels are acyclic") {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.5);
  std::size_t cyclic = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> x(400);
    for (auto& v : x) v = coin(rng) ? 1 : -1;
    cyclic += detect_cycle_size(series_of(x)).cyclic ? 1 : 0;
  }
  CHECK(cyclic <= 1);
}

TEST_CASE("period 20 with 10% label noise over 50 seeds") {
  std::size_t within = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    auto x = square(20, 10, 200);
    flip_some(x, 0.1, rng);
    auto d = detect_cycle_size(series_of(x));
    within += (d.cyclic && d.cycle_size >= 19 && d.cycle_size <= 21) ? 1 : 0;
  }
  CHECK(within >= 45);
}

TEST_CASE("short series are rejected") {
  CHECK_THROWS_AS(detect_cycle_size(series_of(std::vector<int>(7, 1))), InsufficientDataError);
}

TEST_CASE("decompose a simple cycle") {
  auto p = decompose(series_of("LLNN"), 4);
  CHECK(p.array_lm == std::vector<std::size_t>{0, 1});
  CHECK(p.array_nlm == std::vector<std::size_t>{2, 3});
  CHECK(p.is_lm(1));
  CHECK_FALSE(p.is_lm(2));
}

TEST_CASE("decompose an all-LM cycle") {
  auto p = decompose(series_of("LLLLLLLL"), 4);
  CHECK(p.array_lm.size() == 4);
  CHECK(p.array_nlm.empty());
}

TEST_CASE("decompose a complex cycle") {
  auto p = decompose(series_of("NLNNLL"), 6);
  CHECK(p.array_lm == std::vector<std::size_t>{1, 4, 5});
  CHECK(p.array_nlm == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("decompose input checks") {
  CHECK_THROWS(decompose(series_of("LLNN"), 0));
  CHECK_THROWS_AS(decompose(series_of("LLN"), 4), InsufficientDataError);
}

TEST_CASE("majority vote repairs a noisy first cycle") {
  auto clean = square(20, 8, 200);
  auto noisy = clean;
  noisy[2] = -1;
  noisy[15] = 1;
  auto first = decompose(series_of(noisy), 20, 0, DecomposeMode::FirstCycle);
  auto vote = decompose(series_of(noisy), 20, 0, DecomposeMode::MajorityVote);
  auto truth = decompose(series_of(clean), 20);
  CHECK(first.array_lm != truth.array_lm);
  CHECK(vote.array_lm == truth.array_lm);
  CHECK(vote.array_nlm == truth.array_nlm);
}

TEST_CASE("a complex cycle is found by its fundamental") {
  // six LM, four NLM, four LM, six NLM
  std::vector<int> one;
  for (int i = 0; i < 6; ++i) one.push_back(1);
  for (int i = 0; i < 4; ++i) one.push_back(-1);
  for (int i = 0; i < 4; ++i) one.push_back(1);
  for (int i = 0; i < 6; ++i) one.push_back(-1);
  auto cs = series_of(oracle::tile(one, 200));
  auto profile = analyze_cycles(cs);
  REQUIRE(profile.has_value());
  CHECK(profile->cycle_size == 20);
  CHECK(profile->array_lm.size() == 10);
}

TEST_CASE("remaining time when already inside an LM window") {
  auto p = profile_of(10, {3, 4, 5});
  auto r = remaining_time(p, 24);
  CHECK(r.m_relative == 4);
  CHECK(r.remain_time == 0);
  CHECK(r.basis == PostponeBasis::AlreadyLM);
}

TEST_CASE("remaining time forward to the next LM index") {
  std::vector<std::size_t> lm;
  for (std::size_t i = 30; i < 60; ++i) lm.push_back(i);
  auto r = remaining_time(profile_of(60, lm), 70);
  CHECK(r.m_relative == 10);
  CHECK(r.remain_time == 20);
  CHECK(r.basis == PostponeBasis::WaitForLM);
}

TEST_CASE("remaining time wraps to the next cycle") {
  std::vector<std::size_t> lm;
  for (std::size_t i = 0; i < 10; ++i) lm.push_back(i);
  auto r = remaining_time(profile_of(40, lm), 35);
  CHECK(r.m_relative == 35);
  CHECK(r.remain_time == 5);
  CHECK(r.basis == PostponeBasis::WaitForLM);
}

TEST_CASE("no LM position in the cycle") {
  auto r = remaining_time(profile_of(8, {}), 3);
  CHECK(r.basis == PostponeBasis::NoLMInCycle);
  CHECK(r.remain_time != 0);
  CHECK(std::string(to_string(r.basis)) == "no-LM-in-cycle");
}

TEST_CASE("oracle on planted and constant series") {
  CHECK(oracle::cycle_size(square(20, 10, 200)) == std::optional<std::size_t>(20));
  CHECK_FALSE(oracle::cycle_size(std::vector<int>(200, -1)).has_value());
}

TEST_CASE("detector and oracle agree on noiseless planted periods") {
  std::mt19937_64 rng(2);
  for (std::size_t p = 8; p <= 64; ++p) {
    auto x = oracle::tile(oracle::random_period(p, rng), 16 * p);
    auto d = detect_cycle_size(series_of(x));
    auto o = oracle::cycle_size(x);
    REQUIRE(o.has_value());
    CHECK(d.cyclic);
    CHECK(d.cycle_size + 1 >= *o);
    CHECK(d.cycle_size <= *o + 1);
  }
}

TEST_CASE("decompose partitions the cycle") {
  std::mt19937_64 rng(8);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t cycle = 2 + static_cast<std::size_t>(trial % 50);
    std::vector<int> x(cycle * 3);
    for (auto& v : x) v = coin(rng) ? 1 : -1;
    for (auto mode : {DecomposeMode::FirstCycle, DecomposeMode::MajorityVote}) {
      auto p = decompose(series_of(x), cycle, 0, mode);
      std::set<std::size_t> all(p.array_lm.begin(), p.array_lm.end());
      all.insert(p.array_nlm.begin(), p.array_nlm.end());
      REQUIRE(all.size() == cycle);
      REQUIRE(p.array_lm.size() + p.array_nlm.size() == cycle);
      REQUIRE(*all.rbegin() == cycle - 1);
      REQUIRE(std::is_sorted(p.array_lm.begin(), p.array_lm.end()));
    }
  }
}

TEST_CASE("remaining time is periodic and takes the shortest wait") {
  std::mt19937_64 rng(13);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t cycle = 3 + static_cast<std::size_t>(trial % 40);
    std::vector<std::size_t> lm;
    for (std::size_t i = 0; i < cycle; ++i) {
      if (coin(rng)) lm.push_back(i);
    }
    const auto p = profile_of(cycle, lm);
    for (std::size_t m = 0; m < 4 * cycle; ++m) {
      const auto a = remaining_time(p, m);
      const auto b = remaining_time(p, m + cycle);
      REQUIRE(a.remain_time == b.remain_time);
      REQUIRE(a.basis == b.basis);
      if (a.basis != PostponeBasis::WaitForLM) continue;
      REQUIRE(p.is_lm((a.m_relative + a.remain_time) % cycle));
      for (std::size_t k = 1; k < a.remain_time; ++k) {
        REQUIRE_FALSE(p.is_lm((a.m_relative + k) % cycle));
      }
    }
  }
}

TEST_CASE("rotating the series does not change the detected cycle") {
  std::mt19937_64 rng(21);
  for (std::size_t p : {12u, 20u, 30u, 45u}) {
    const std::size_t n = 8 * p;
    const auto base = oracle::tile(oracle::random_period(p, rng), n + p);
    for (std::size_t shift = 0; shift < p; ++shift) {
      std::vector<int> x(base.begin() + static_cast<std::ptrdiff_t>(shift),
                         base.begin() + static_cast<std::ptrdiff_t>(shift + n));
      auto d = detect_cycle_size(series_of(x));
      REQUIRE(d.cyclic);
      REQUIRE(d.cycle_size == p);
    }
  }
}

TEST_CASE("windows that are not a whole number of cycles") {
  for (std::size_t p : {9u, 13u, 20u, 33u}) {
    for (std::size_t extra : {1u, 3u, 5u}) {
      const std::size_t n = 6 * p + extra;
      auto d = detect_cycle_size(series_of(square(p, p / 2, n)));
      CHECK(d.cyclic);
      CHECK(d.cycle_size == p);
    }
  }
}

TEST_CASE("raw cpu signal of a synthesized trace") {
  auto s = synthesize({{PhaseKind::Cpu, 150}, {PhaseKind::Idle, 150}, {PhaseKind::Mem, 150}}, 6,
                      15.0, 0.05, 3);
  auto signal = cpu_signal(s);
  REQUIRE(signal.size() == s.size());
  auto d = detect_cycle_size(std::span<const double>(signal));
  CHECK(d.cyclic);
  CHECK(d.cycle_size == 30);
}

TEST_CASE("the spectrum has n/2 + 1 bins and no DC after centring") {
  auto x = square(16, 8, 64);
  std::vector<double> signal(x.begin(), x.end());
  auto mag = magnitude_spectrum(signal);
  CHECK(mag.size() == 33);
  CHECK(mag[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::max_element(mag.begin(), mag.end()) - mag.begin() == 4);
}
