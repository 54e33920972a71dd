#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "tqkd/errors.hpp"
#include "tqkd/optimize.hpp"

using namespace tqkd;

namespace {

const SecurityParams kSec{1e-10, 1.0};

// Exhaustive-scan oracle: every feasible k, smallest argmax wins.
std::pair<std::uint64_t, std::uint64_t> brute_force_k(std::uint64_t signals,
                                                      const ChannelSpec& ch,
                                                      Protocol p) {
  const std::uint64_t k_max = max_cm_samples(signals);
  std::uint64_t best_k = 1;
  std::uint64_t best_len = 0;
  bool have = false;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    const auto len = key_length(allocate(signals, k, p), ch, kSec).key_length;
    if (!have || len > best_len) {
      best_k = k;
      best_len = len;
      have = true;
    }
  }
  return {best_k, best_len};
}

}  // namespace

TEST_CASE("optimizer equals the exhaustive scan on random instances") {
  std::mt19937_64 gen(424242);
  std::uniform_int_distribution<std::uint64_t> m_dist(16, 100000);
  std::uniform_real_distribution<double> q_dist(0.0, 0.16);
  const Protocol protocols[] = {Protocol::bb84(), Protocol::lm05(),
                                Protocol::sdc()};
  const ChannelMode modes[] = {ChannelMode::Independent,
                               ChannelMode::Correlated};
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t m = m_dist(gen);
    const ChannelSpec ch{q_dist(gen), modes[gen() % 2]};
    const Protocol p = protocols[gen() % 3];
    CAPTURE(m);
    CAPTURE(ch.q);
    const auto expected = brute_force_k(m, ch, p);
    const auto got = optimize_k(m, ch, kSec, p);
    CHECK(got.k_star == expected.first);
    CHECK(got.breakdown.key_length == expected.second);
  }
}

TEST_CASE("dead protocol yields the smallest k with zero length") {
  const ChannelSpec ch{0.5, ChannelMode::Independent};  // q/2 = 0.25, hopeless
  const auto report = optimize_k(10000, ch, kSec, Protocol::bb84());
  CHECK(report.breakdown.key_length == 0);
  CHECK(report.k_star == 1);
}

TEST_CASE("optimizer bounds and preconditions") {
  CHECK_THROWS_AS(
      optimize_k(15, {0.0, ChannelMode::Independent}, kSec, Protocol::bb84()),
      InfeasibleAllocation);
  const auto report = optimize_k(10000, {0.02, ChannelMode::Independent}, kSec,
                                 Protocol::lm05(), true);
  CHECK(report.k_star >= 1);
  CHECK(report.k_star <= max_cm_samples(10000));
  CHECK(!report.scan_trace.empty());
  CHECK(report.allocation.cm_samples == report.k_star);
}

TEST_CASE("optimal k grows sublinearly in the block size") {
  const ChannelSpec ch{0.02, ChannelMode::Independent};
  double prev_fraction = 1.0;
  for (double m : {1e4, 1e5, 1e6, 1e7}) {
    const auto report =
        optimize_k(static_cast<std::uint64_t>(m), ch, kSec, Protocol::bb84());
    const double fraction = double(report.k_star) / m;
    CHECK(fraction < prev_fraction);
    prev_fraction = fraction;
  }
}

TEST_CASE("sweep over the error rate") {
  SweepSpec spec;
  spec.protocols = {Protocol::bb84(), Protocol::lm05(), Protocol::sdc()};
  spec.mode = ChannelMode::Independent;
  spec.axis = SweepAxis::ErrorRate;
  spec.axis_min = 0.0;
  spec.axis_max = 0.05;
  spec.points = 11;
  spec.signals = 10000;
  spec.sec = kSec;

  const auto rows = sweep(spec);
  REQUIRE(rows.size() == 11);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].cells.size() == 3);
    if (i > 0) CHECK(rows[i].axis_value > rows[i - 1].axis_value);
  }
  // noiseless finite block still pays the fluctuation and constant penalties
  CHECK(rows[0].cells[0].feasible);
  CHECK(rows[0].cells[0].efficiency > 0.0);
  CHECK(rows[0].cells[0].efficiency < 1.0);

  // deterministic and independent of the worker count
  const auto serial = sweep(spec, 1);
  const auto parallel = sweep(spec, 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].cells.size(); ++j) {
      CHECK(serial[i].cells[j].k_star == parallel[i].cells[j].k_star);
      CHECK(serial[i].cells[j].key_length == parallel[i].cells[j].key_length);
      CHECK(serial[i].cells[j].efficiency == parallel[i].cells[j].efficiency);
    }
  }
}

TEST_CASE("sweep marks infeasible grid points as empty cells") {
  SweepSpec spec;
  spec.protocols = {Protocol::bb84()};
  spec.axis = SweepAxis::ErrorRate;
  spec.axis_min = 0.45;
  spec.axis_max = 0.55;  // q/2 beyond 0.5 means q > 1
  spec.points = 3;
  spec.signals = 10000;
  spec.sec = kSec;
  const auto rows = sweep(spec);
  CHECK(rows[0].cells[0].feasible);
  CHECK(rows[0].cells[0].key_length == 0);  // dead but well-defined
  CHECK(!rows[2].cells[0].feasible);
}

TEST_CASE("logarithmic block-size sweep approaches the asymptote") {
  SweepSpec spec;
  spec.protocols = {Protocol::bb84()};
  spec.axis = SweepAxis::BlockSize;
  spec.axis_min = 1e4;
  spec.axis_max = 1e7;
  spec.points = 4;
  spec.log_spacing = true;
  spec.qhalf = 0.01;
  spec.sec = kSec;
  const auto rows = sweep(spec);
  const double limit = asymptotic_efficiency(
      Protocol::bb84(), {0.02, ChannelMode::Independent});
  double prev = -1.0;
  for (const auto& row : rows) {
    REQUIRE(row.cells[0].feasible);
    CHECK(row.cells[0].efficiency > prev);
    CHECK(row.cells[0].efficiency < limit);
    prev = row.cells[0].efficiency;
  }
}

TEST_CASE("sweep spec validation") {
  SweepSpec spec;
  spec.protocols = {Protocol::bb84()};
  spec.axis_min = 0.1;
  spec.axis_max = 0.1;
  spec.points = 5;
  spec.signals = 10000;
  spec.sec = kSec;
  CHECK_THROWS_AS(sweep(spec), std::invalid_argument);
  spec.axis_max = 0.2;
  spec.points = 1;
  CHECK_THROWS_AS(sweep(spec), std::invalid_argument);
  spec.points = 5;
  spec.axis_min = 0.0;
  spec.log_spacing = true;
  CHECK_THROWS_AS(sweep(spec), std::invalid_argument);
  spec.protocols.clear();
  CHECK_THROWS_AS(sweep(spec), std::invalid_argument);
}

TEST_CASE("zero thresholds") {
  const ChannelSpec ind{0.0, ChannelMode::Independent};
  const double asym = asymptotic_zero_threshold(Protocol::bb84(),
                                                ChannelMode::Independent);
  CHECK(asym > 0.1095);
  CHECK(asym < 0.1105);

  const double finite = zero_threshold(Protocol::bb84(), 100000, ind, kSec);
  CHECK(finite < asym);
  CHECK(finite > 0.0);

  // reproducible to the bracket tolerance
  CHECK(zero_threshold(Protocol::bb84(), 100000, ind, kSec) == finite);

  // LM05 and BB84 share the correlated-mode asymptotic threshold
  const double a = asymptotic_zero_threshold(Protocol::lm05(),
                                             ChannelMode::Correlated);
  const double b = asymptotic_zero_threshold(Protocol::bb84(),
                                             ChannelMode::Correlated);
  CHECK(std::abs(a - b) <= 2e-5);

  CHECK_THROWS_AS(zero_threshold(Protocol::bb84(), 16, ind, kSec),
                  NoPositiveRate);
}

TEST_CASE("LM05/BB84 crossover near 2.7% at M = 1e4") {
  const double x = crossover(Protocol::lm05(), Protocol::bb84(), 10000,
                             {0.0, ChannelMode::Independent}, kSec);
  CHECK(x > 0.022);
  CHECK(x < 0.032);
  // deterministic bisection: bit-identical on a second run
  CHECK(crossover(Protocol::lm05(), Protocol::bb84(), 10000,
                  {0.0, ChannelMode::Independent}, kSec) == x);
}

TEST_CASE("LM05 outperforms both others at small blocks and low error") {
  const ChannelSpec ch{0.02, ChannelMode::Independent};  // q/2 = 0.01
  const double lm05 =
      optimize_k(10000, ch, kSec, Protocol::lm05()).breakdown.efficiency;
  const double bb84 =
      optimize_k(10000, ch, kSec, Protocol::bb84()).breakdown.efficiency;
  const double sdc =
      optimize_k(10000, ch, kSec, Protocol::sdc()).breakdown.efficiency;
  CHECK(lm05 > bb84);
  CHECK(lm05 > sdc);
}

TEST_CASE("dominated pairs raise NoCrossover") {
  // LM05 stays above SDC over the whole live bracket at M = 1e4
  CHECK_THROWS_AS(crossover(Protocol::lm05(), Protocol::sdc(), 10000,
                            {0.0, ChannelMode::Independent}, kSec),
                  NoCrossover);
  // identical correlated asymptotics never cross
  CHECK_THROWS_AS(
      asymptotic_crossover(Protocol::lm05(), Protocol::bb84(),
                           ChannelMode::Correlated),
      NoCrossover);
}
