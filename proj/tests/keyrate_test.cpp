#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tqkd/errors.hpp"
#include "tqkd/keyrate.hpp"

using namespace tqkd;

namespace {
bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }
const SecurityParams kSec{1e-10, 1.0};
}  // namespace

TEST_CASE("protocol constants") {
  CHECK(Protocol::bb84().overlap() == 0.5);
  CHECK(Protocol::lm05().overlap() == 0.5);
  CHECK(Protocol::sdc().overlap() == 0.25);
  for (Protocol p : {Protocol::bb84(), Protocol::lm05(), Protocol::sdc()}) {
    CHECK(p.uncertainty_bits() == -std::log2(p.overlap()));
  }
  CHECK(Protocol::bb84().pair_factor() == 1);
  CHECK(Protocol::lm05().pair_factor() == 1);
  CHECK(Protocol::sdc().pair_factor() == 2);
}

TEST_CASE("allocation on the exact-square example") {
  const auto lm05 = allocate(40000, 10000, Protocol::lm05());
  CHECK(lm05.em_samples == 10000);
  CHECK(lm05.em_probability == 0.5);
  CHECK(lm05.em_bits_effective == 20000);
  CHECK(lm05.wasted == 10000);

  const auto bb84 = allocate(40000, 10000, Protocol::bb84());
  CHECK(bb84.em_samples == 10000);
  CHECK(bb84.em_bits_effective == 10000);
  CHECK(bb84.wasted == 20000);

  const auto sdc = allocate(40000, 10000, Protocol::sdc());
  CHECK(sdc.em_samples == 10000);
  CHECK(sdc.wasted == 20000);
}

TEST_CASE("allocation feasibility errors") {
  CHECK_THROWS_AS(allocate(100, 0, Protocol::bb84()), InfeasibleAllocation);
  CHECK_THROWS_AS(allocate(100, 82, Protocol::bb84()), InfeasibleAllocation);
  CHECK_NOTHROW(allocate(100, 81, Protocol::bb84()));
}

TEST_CASE("allocation counting identities") {
  const std::vector<std::uint64_t> signals{100, 1000, 40000, 123457, 9999999};
  for (auto m : signals) {
    for (double frac : {0.01, 0.05, 0.1, 0.25, 0.5}) {
      const auto k = static_cast<std::uint64_t>(frac * double(m));
      if (k < 1) continue;
      for (Protocol p : {Protocol::bb84(), Protocol::lm05(), Protocol::sdc()}) {
        const auto a = allocate(m, k, p);
        CHECK(a.em_bits_effective + a.cm_samples + a.wasted == m);
        CHECK(a.em_samples >= 1);
        CHECK(a.em_probability > 0.0);
        CHECK(a.em_probability < 1.0);

        // expected-count consistency, up to integer rounding
        const double c = a.em_probability;
        if (p.kind == ProtocolKind::LM05) {
          CHECK(near(c * double(m), double(a.em_bits_effective), 2.0));
        } else {
          CHECK(near(c * c * double(m), double(a.em_samples), 2.0));
        }

        // deterministic
        const auto b = allocate(m, k, p);
        CHECK(a.em_samples == b.em_samples);
        CHECK(a.wasted == b.wasted);
      }
    }
  }
}

TEST_CASE("SDC key length at q = 0, n = k = 1e6") {
  // frozen via direct evaluation:
  //   floor(2e6 (1 - h2(mu)) - log2(2e20)) with mu = 6.8875e-3
  const auto alloc = allocate(4000000, 1000000, Protocol::sdc());
  REQUIRE(alloc.em_samples == 1000000);
  const auto kb = key_length_sdc(alloc, {0.0, ChannelMode::Independent}, kSec);
  CHECK(kb.key_length == 1881198);
  CHECK(kb.raw_bits == 2000000);
  CHECK(kb.ec_leak == 0.0);
  CHECK(near(kb.const_term, 67.43856189774725, 1e-9));
  CHECK(near(kb.efficiency, 1881198.0 / 8000000.0, 1e-15));
}

TEST_CASE("LM05 key length at q = 0, M = 40000, k = 10000") {
  // frozen: floor(20000 (1 - h2(mu(20000, 10000))) - log2(2e20))
  const auto alloc = allocate(40000, 10000, Protocol::lm05());
  const auto kb = key_length_lm05(alloc, {0.0, ChannelMode::Independent}, kSec);
  CHECK(kb.raw_bits == 20000);
  CHECK(kb.key_length == 13411);
}

TEST_CASE("key length functions reject foreign allocations") {
  const auto alloc = allocate(40000, 10000, Protocol::bb84());
  const ChannelSpec ch{0.02, ChannelMode::Independent};
  CHECK_THROWS_AS(key_length_sdc(alloc, ch, kSec), std::invalid_argument);
  CHECK_THROWS_AS(key_length_lm05(alloc, ch, kSec), std::invalid_argument);
  CHECK_NOTHROW(key_length_bb84(alloc, ch, kSec));
}

TEST_CASE("oversized fluctuation clamps the key to zero") {
  const auto alloc = allocate(16, 9, Protocol::bb84());
  REQUIRE(alloc.em_samples == 1);
  const auto kb = key_length_bb84(alloc, {0.0, ChannelMode::Independent}, kSec);
  CHECK(kb.key_length == 0);
  CHECK(kb.efficiency == 0.0);
}

TEST_CASE("key length is nonincreasing in q") {
  for (Protocol p : {Protocol::bb84(), Protocol::lm05(), Protocol::sdc()}) {
    const auto alloc = allocate(1000000, 40000, p);
    for (ChannelMode mode : {ChannelMode::Independent, ChannelMode::Correlated}) {
      std::uint64_t prev = ~0ULL;
      for (int i = 0; i <= 50; ++i) {
        const auto kb = key_length(alloc, {i / 50.0, mode}, kSec);
        CHECK(kb.key_length <= prev);
        prev = kb.key_length;
      }
    }
  }
}

TEST_CASE("error-correction cofactor shortens the key") {
  const auto alloc = allocate(1000000, 40000, Protocol::bb84());
  const ChannelSpec ch{0.02, ChannelMode::Independent};
  const auto ideal = key_length_bb84(alloc, ch, kSec);
  const auto practical = key_length_bb84(alloc, ch, SecurityParams{1e-10, 1.2});
  CHECK(practical.key_length < ideal.key_length);
  CHECK(near(practical.ec_leak, 1.2 * ideal.ec_leak, 1e-6));
}

TEST_CASE("LM05 fluctuation advantage at equal (M, k)") {
  const auto lm05 = allocate(40000, 10000, Protocol::lm05());
  const auto bb84 = allocate(40000, 10000, Protocol::bb84());
  const double mu_lm05 = statistical_fluctuation(lm05.em_bits_effective,
                                                 lm05.cm_samples, kSec.eps_s);
  const double mu_bb84 =
      statistical_fluctuation(bb84.em_samples, bb84.cm_samples, kSec.eps_s);
  CHECK(mu_lm05 < mu_bb84);
  const double qhalf = 0.01;
  CHECK(binary_entropy(qhalf + mu_lm05) < binary_entropy(qhalf + mu_bb84));
}

TEST_CASE("asymptotic efficiencies, frozen evaluations") {
  CHECK(asymptotic_efficiency(Protocol::sdc(), {0.0, ChannelMode::Independent}) ==
        1.0);
  CHECK(near(asymptotic_efficiency(Protocol::sdc(),
                                   {0.1, ChannelMode::Independent}),
             0.3053000518261302, 1e-4));
  CHECK(near(asymptotic_efficiency(Protocol::lm05(),
                                   {0.1, ChannelMode::Independent}),
             0.26066049469676056, 1e-4));
  CHECK(near(asymptotic_efficiency(Protocol::sdc(),
                                   {0.1, ChannelMode::Correlated}),
             0.4620111770437518, 1e-4));
  CHECK(near(asymptotic_efficiency(Protocol::bb84(),
                                   {0.1, ChannelMode::Independent}),
             1.0 - 2.0 * binary_entropy(0.05), 1e-12));
}

TEST_CASE("correlated infinite key: LM05 coincides with BB84, SDC exceeds") {
  for (int i = 0; i <= 1000; ++i) {
    const double q = i / 1000.0;
    const ChannelSpec ch{q, ChannelMode::Correlated};
    const double bb84 = asymptotic_efficiency(Protocol::bb84(), ch);
    const double lm05 = asymptotic_efficiency(Protocol::lm05(), ch);
    CHECK(near(bb84, lm05, 1e-12));
    if (i > 0 && bb84 > 0.0) {
      CHECK(asymptotic_efficiency(Protocol::sdc(), ch) > bb84);
    }
  }
}

TEST_CASE("independent infinite key dominance: BB84 >= SDC >= LM05") {
  for (int i = 1; i < 1000; ++i) {
    const double q = i / 1000.0;
    const ChannelSpec ch{q, ChannelMode::Independent};
    const double bb84 = asymptotic_efficiency(Protocol::bb84(), ch);
    const double sdc = asymptotic_efficiency(Protocol::sdc(), ch);
    const double lm05 = asymptotic_efficiency(Protocol::lm05(), ch);
    CHECK(bb84 >= sdc - 1e-12);
    CHECK(sdc >= lm05 - 1e-12);
  }
}

TEST_CASE("finite key approaches the asymptote from below as M grows") {
  // k ~ ceil(sqrt(n)) keeps the fluctuation shrinking; the gap to the
  // infinite-key efficiency must fall monotonically with block size.
  const ChannelSpec ch{0.02, ChannelMode::Independent};
  for (Protocol p : {Protocol::bb84(), Protocol::lm05(), Protocol::sdc()}) {
    const double limit = asymptotic_efficiency(p, ch);
    double prev_gap = 1e300;
    for (double m : {1e5, 1e7, 1e9, 1e11, 1e13}) {
      const auto signals = static_cast<std::uint64_t>(m);
      auto k = static_cast<std::uint64_t>(std::ceil(std::sqrt(m)));
      k = static_cast<std::uint64_t>(std::ceil(
          std::sqrt(double(allocate(signals, k, p).em_samples))));
      const auto kb = key_length(allocate(signals, k, p), ch, kSec);
      const double gap = limit - kb.efficiency;
      CHECK(gap > 0.0);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
  }
}

TEST_CASE("Devetak-Winter rates") {
  const PauliErrorTriple zero{};
  CHECK(dw_rate(Protocol::sdc(), ErrorStat{zero}, ErrorStat{zero}) == 2.0);
  CHECK(dw_rate(Protocol::lm05(), ErrorStat{0.0}, ErrorStat{0.0}) == 1.0);
  CHECK(near(dw_rate(Protocol::lm05(), ErrorStat{0.5}, ErrorStat{0.5}), -1.0,
             1e-12));
  CHECK(dw_rate(Protocol::bb84(), ErrorStat{0.0}, ErrorStat{0.0}) == 1.0);
  CHECK_THROWS_AS(dw_rate(Protocol::sdc(), ErrorStat{0.1}, ErrorStat{0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(dw_rate(Protocol::lm05(), ErrorStat{zero}, ErrorStat{zero}),
                  std::invalid_argument);
}

TEST_CASE("security parameter validation") {
  const auto alloc = allocate(40000, 10000, Protocol::bb84());
  const ChannelSpec ch{0.02, ChannelMode::Independent};
  CHECK_THROWS_AS(key_length_bb84(alloc, ch, SecurityParams{0.0, 1.0}),
                  std::domain_error);
  CHECK_THROWS_AS(key_length_bb84(alloc, ch, SecurityParams{1e-10, 0.0}),
                  std::domain_error);
}
