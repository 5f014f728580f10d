#include <doctest.h>

#include <cmath>
#include <random>

#include "alma/error.hpp"
#include "alma/migration.hpp"
#include "alma/trace.hpp"
#include "oracles.hpp"

using namespace alma;

namespace {

MigrationParams make(double v_mem, double bw) {
  MigrationParams p;
  p.v_mem = v_mem;
  p.bandwidth = bw;
  return p;
}

// Dirty rate in pages/s for a given fraction of the link, at 4 KB pages.
double pages_for(double ratio, double bw) { return ratio * bw * 256.0; }

double t_mig(double v_mem, double bw, double pages) {
  return simulate_precopy(make(v_mem, bw), DirtyRateProfile::constant(pages)).t_mig;
}

}  // namespace

TEST_CASE("bounds for 1024 MB over 128 MB/s") {
  auto b = bounds(make(1024, 128));
  CHECK(b.lower_mig == doctest::Approx(8.0));
  CHECK(b.upper_mig == doctest::Approx(240.0));
  CHECK(b.upper_down == doctest::Approx(240.0));
  CHECK(bounds(make(1024, 1e9)).lower_mig < 1e-5);
}

TEST_CASE("shared-link bounds use the extreme bandwidths") {
  auto b = bounds(make(1024, 128), 64, 128);
  CHECK(b.lower_mig == doctest::Approx(8.0));
  CHECK(b.upper_mig == doctest::Approx(480.0));
}

TEST_CASE("parameter validation") {
  auto p = make(1024, 128);
  CHECK_NOTHROW(p.validate());
  p.transfer_cap_factor = 0.5;
  CHECK_THROWS(p.validate());
  p = make(0, 128);
  CHECK_THROWS(p.validate());
  p = make(1024, 0);
  CHECK_THROWS(p.validate());
}

TEST_CASE("an idle VM needs one round and only activation downtime") {
  auto p = make(1024, 128);
  auto o = simulate_precopy(p, DirtyRateProfile::constant(0));
  CHECK(o.rounds == 1);
  CHECK(o.transferred == doctest::Approx(1024.0));
  CHECK(o.t_down == doctest::Approx(p.activation_overhead));
  CHECK(std::abs(o.t_mig - (8.0 + p.activation_overhead)) <= 1e-9 * o.t_mig);
  CHECK(o.final_copy == 0.0);
  CHECK(o.stop_reason == StopReason::DirtyThreshold);
}

TEST_CASE("dirtying faster than the link saturates") {
  auto p = make(1024, 128);
  for (double ratio : {1.0, 1.5, 4.0}) {
    auto o = simulate_precopy(p, DirtyRateProfile::constant(pages_for(ratio, 128)));
    CHECK((o.stop_reason == StopReason::TransferCap || o.stop_reason == StopReason::MaxRounds));
    CHECK(o.t_mig <= bounds(p).upper_mig);
    CHECK(o.t_mig >= bounds(p).lower_mig);
  }
}

TEST_CASE("10 MB/s dirtying matches the reference loop") {
  auto p = make(1024, 128);
  auto o = simulate_precopy(p, DirtyRateProfile::constant(2560));
  auto r = oracle::precopy(1024, 128, 2560, 4, 29, 50, 3, 0.2);
  CHECK(o.rounds == r.rounds);
  CHECK(to_string(o.stop_reason) == r.reason);
  CHECK(o.t_mig == doctest::Approx(r.t_mig).epsilon(1e-12));
  CHECK(o.t_down == doctest::Approx(r.t_down).epsilon(1e-12));
  CHECK(o.transferred == doctest::Approx(r.transferred).epsilon(1e-12));
  REQUIRE(o.round_volumes.size() == r.volumes.size());
  for (std::size_t i = 0; i < r.volumes.size(); ++i) {
    CHECK(o.round_volumes[i] == doctest::Approx(r.volumes[i]).epsilon(1e-12));
  }
  for (std::size_t i = 1; i < o.round_volumes.size(); ++i) {
    CHECK(o.round_volumes[i] < o.round_volumes[i - 1]);
  }
}

TEST_CASE("reference loop agreement across stop reasons") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> mem(64, 8192), bw(10, 1250), ratio(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const double v = mem(rng), b = bw(rng), d = pages_for(ratio(rng), b);
    auto o = simulate_precopy(make(v, b), DirtyRateProfile::constant(d));
    auto r = oracle::precopy(v, b, d, 4, 29, 50, 3, 0.2);
    REQUIRE(o.rounds == r.rounds);
    REQUIRE(to_string(o.stop_reason) == r.reason);
    REQUIRE(o.t_mig == doctest::Approx(r.t_mig).epsilon(1e-9));
    REQUIRE(o.transferred == doctest::Approx(r.transferred).epsilon(1e-9));
  }
}

TEST_CASE("outcomes respect both inequalities") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> mem(256, 8192), bw(10, 1250), ratio(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    auto p = make(mem(rng), bw(rng));
    auto o = simulate_precopy(p, DirtyRateProfile::constant(pages_for(ratio(rng), p.bandwidth)));
    const auto b = bounds(p);
    REQUIRE(o.bounds.lower_mig == doctest::Approx(b.lower_mig));
    REQUIRE(o.bounds.upper_mig == doctest::Approx(b.upper_mig));
    REQUIRE(o.t_mig >= b.lower_mig);
    REQUIRE(o.t_mig <= b.upper_mig);
    REQUIRE(o.t_down >= 0.0);
    REQUIRE(o.t_down <= b.upper_down);
    REQUIRE(o.transferred >= p.v_mem);
  }
}

TEST_CASE("a contracting dirty rate stops on the page threshold") {
  for (double v : {512.0, 1024.0, 4096.0}) {
    for (double b : {20.0, 125.0, 1000.0}) {
      for (double ratio : {0.0, 0.1, 0.3, 0.6}) {
        auto o = simulate_precopy(make(v, b), DirtyRateProfile::constant(pages_for(ratio, b)));
        CHECK(o.stop_reason == StopReason::DirtyThreshold);
        CHECK(o.rounds < 29);
      }
    }
  }
}

TEST_CASE("more bandwidth never slows a contracting migration") {
  for (double v : {512.0, 1024.0, 2048.0}) {
    for (double dirty_mb : {0.0, 1.0, 5.0, 12.0}) {
      double previous = HUGE_VAL;
      for (double b = 20.0; b <= 1000.0; b *= 1.25) {
        if (dirty_mb / b > 0.6) continue;
        const double t = t_mig(v, b, dirty_mb * 256.0);
        REQUIRE(t <= previous + 1e-12);
        previous = t;
      }
    }
  }
}

TEST_CASE("a higher dirty rate never speeds up a contracting migration") {
  for (double v : {512.0, 1024.0, 2048.0}) {
    for (double b : {40.0, 125.0, 500.0}) {
      double previous = 0.0;
      for (double ratio = 0.0; ratio <= 0.6; ratio += 0.01) {
        const double t = t_mig(v, b, pages_for(ratio, b));
        REQUIRE(t >= previous - 1e-12);
        previous = t;
      }
    }
  }
}

TEST_CASE("the transfer cap can shorten a migration at high dirty rates") {
  // Past roughly two thirds of the link the cap cuts the loop off early, so
  // a slightly higher rate may finish sooner. Monotonicity is only claimed
  // below that regime.
  const double a = t_mig(1024, 128, pages_for(0.81, 128));
  const double b = t_mig(1024, 128, pages_for(0.82, 128));
  CHECK(b < a);
}

TEST_CASE("simulation is deterministic") {
  auto p = make(2048, 100);
  auto dirty = DirtyRateProfile::steps(0, 15, {100, 9000, 300, 12000, 50});
  auto a = simulate_precopy(p, dirty, 3.0);
  auto b = simulate_precopy(p, dirty, 3.0);
  CHECK(a.t_mig == b.t_mig);
  CHECK(a.round_volumes == b.round_volumes);
  CHECK(a.start_time == 3.0);
}

TEST_CASE("step profiles integrate exactly") {
  auto d = DirtyRateProfile::steps(10, 5, {1, 2, 4});
  CHECK(d.rate_at(10) == 1);
  CHECK(d.rate_at(17) == 2);
  CHECK(d.rate_at(100) == 4);
  CHECK(d.integral(10, 25) == doctest::Approx(35.0));
  CHECK(d.integral(12, 21) == doctest::Approx(3 + 10 + 4));
  CHECK(d.integral(25, 30) == doctest::Approx(20.0));

  LoadSeries s{"vm", 15.0, {{0, 0, 0, 100, 0}, {15, 0, 0, 300, 0}}};
  auto f = DirtyRateProfile::from_series(s);
  CHECK(f.integral(0, 30) == doctest::Approx(6000.0));
}

TEST_CASE("function profiles integrate polynomials") {
  auto d = DirtyRateProfile::function([](double t) { return 3 * t * t + 2; });
  CHECK(d.integral(0, 2) == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(d.rate_at(1) == 5.0);
}

TEST_CASE("stepping the process in slices reproduces one-shot simulation") {
  auto p = make(1024, 128);
  auto dirty = DirtyRateProfile::constant(6000);
  const auto whole = simulate_precopy(p, dirty);

  PrecopyProcess proc(p, 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> slice(0.01, 2.0);
  double sent = 0.0;
  while (!proc.done()) {
    const double dt = std::min(slice(rng), proc.time_to_stage_end(128));
    sent += proc.advance(dt, 128, dirty);
  }
  const auto o = proc.outcome();
  CHECK(o.t_mig == doctest::Approx(whole.t_mig).epsilon(1e-9));
  CHECK(o.transferred == doctest::Approx(whole.transferred).epsilon(1e-9));
  CHECK(sent == doctest::Approx(whole.transferred).epsilon(1e-9));
  CHECK(o.rounds == whole.rounds);
}

TEST_CASE("varying bandwidth stays inside the shared-link bounds") {
  auto p = make(1024, 128);
  auto dirty = DirtyRateProfile::constant(3000);
  PrecopyProcess proc(p, 0.0);
  int step = 0;
  while (!proc.done()) {
    const double bw = step++ % 2 == 0 ? 128.0 : 42.0;
    proc.advance(std::min(0.5, proc.time_to_stage_end(bw)), bw, dirty);
  }
  const auto o = proc.outcome();
  CHECK(o.bounds.lower_mig == doctest::Approx(1024.0 / 128.0));
  CHECK(o.bounds.upper_mig == doctest::Approx(30.0 * 1024.0 / 42.0));
  CHECK(o.t_mig >= o.bounds.lower_mig);
  CHECK(o.t_mig <= o.bounds.upper_mig);
  CHECK_THROWS(PrecopyProcess(p, 0.0).outcome());
}
