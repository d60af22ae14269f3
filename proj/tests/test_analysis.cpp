#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aoisim/analysis.hpp"
#include "aoisim/rng.hpp"

using namespace aoisim;

namespace {

// Independent check of the two-slot comparison: simulate the ages directly.
// Slot 1 serves a designated terminal; between the slots each terminal may
// receive a fresh packet (terminal 1 with probability delta, terminal 2 with
// 1 - delta) that replaces whatever it holds; slot 2 serves the nonempty
// terminal whose delivery cuts the most age.  A packet is tracked by the age
// it confers at the end of the current slot: the starting packets confer
// h + 1 - g in slot one (one more each slot after), a fresh packet confers 1
// in slot two.  Returns the expected mean of the four end-of-slot ages.
double enumerate_two_slot(const TwoSlotCase& c, bool serve_second_first) {
  struct Pkt {
    bool present = false;
    double confer = 0.0;  // age conferred if delivered at the end of slot 2
  };

  double x1 = c.h1 + 1.0, x2 = c.h2 + 1.0;
  Pkt held1{true, c.h1 + 2.0 - c.g1}, held2{true, c.h2 + 2.0 - c.g2};
  if (serve_second_first) {
    x2 = c.h2 + 1.0 - c.g2;
    held2.present = false;
  } else {
    x1 = c.h1 + 1.0 - c.g1;
    held1.present = false;
  }
  const double first_slot = x1 + x2;

  double second_slot = 0.0;
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) {
      const double w = (a1 ? c.delta : 1.0 - c.delta) *
                       (a2 ? 1.0 - c.delta : c.delta);
      Pkt b1 = a1 ? Pkt{true, 1.0} : held1;
      Pkt b2 = a2 ? Pkt{true, 1.0} : held2;
      const double drop1 = b1.present ? x1 + 1.0 - b1.confer : 0.0;
      const double drop2 = b2.present ? x2 + 1.0 - b2.confer : 0.0;
      double y1 = x1 + 1.0, y2 = x2 + 1.0;
      if (b1.present && (!b2.present || drop1 > drop2))
        y1 = b1.confer;
      else if (b2.present)
        y2 = b2.confer;
      second_slot += w * (y1 + y2);
    }
  }
  return (first_slot + second_slot) / 4.0;
}

TwoSlotCase sample_valid_case(RngStream& rng) {
  for (;;) {
    TwoSlotCase c;
    c.delta = 0.02 + 0.96 * rng.next_double();
    c.h1 = 0.5 + 4.5 * rng.next_double();
    c.g2 = c.h1 + 1.0 + 5.0 * rng.next_double();
    c.g1 = c.g2 * (0.55 + 0.43 * rng.next_double());
    c.h2 = c.g2 + c.h1 + 0.05 + 5.0 * rng.next_double();
    try {
      c.validate();
      return c;
    } catch (const std::invalid_argument&) {
    }
  }
}

}  // namespace

TEST_CASE("round-robin average age closed form") {
  const std::vector<double> half = {0.5, 0.5};
  CHECK(rr_one_avg_aoi(half) == doctest::Approx(2.5).epsilon(1e-12));
  const std::vector<double> single = {1.0};
  CHECK(rr_one_avg_aoi(single) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> mixed = {0.2, 0.4, 1.0};
  // mean of 1/rate = (5 + 2.5 + 1)/3, plus (n-1)/2.
  CHECK(rr_one_avg_aoi(mixed) ==
        doctest::Approx((5.0 + 2.5 + 1.0) / 3.0 + 1.0).epsilon(1e-12));
  const std::vector<double> dead = {0.5, 0.0};
  CHECK(std::isinf(rr_one_avg_aoi(dead)));
}

TEST_CASE("service and sampling floors") {
  const std::vector<double> rates = {0.5, 0.5};
  const LowerBounds lb = aoi_lower_bounds(rates);
  CHECK(lb.collision_floor == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(lb.arrival_floor == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(un_one_floor(7) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("stationary age law sums to one and carries the closed-form mean") {
  for (const auto& [rate, n] : std::vector<std::pair<double, std::uint32_t>>{
           {0.3, 2}, {0.6, 10}, {1.0, 5}, {0.05, 4}}) {
    const StationaryDistribution d = rr_one_stationary(rate, n, 64);
    CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
    const double want = 1.0 / rate + (n - 1.0) / 2.0;
    CHECK(d.mean() == doctest::Approx(want).epsilon(1e-10));
    // Tabulated head and analytic tail agree where they meet.
    CHECK(d.mass(64) == doctest::Approx(d.pmf[63]).epsilon(1e-12));
    if (rate < 1.0) CHECK(d.mass(70) > 0.0);
  }
}

TEST_CASE("saturated stationary age law is uniform") {
  const StationaryDistribution d = rr_one_stationary(1.0, 5, 32);
  for (int j = 1; j <= 5; ++j)
    CHECK(d.pmf[j - 1] == doctest::Approx(0.2).epsilon(1e-12));
  for (int j = 6; j <= 32; ++j) CHECK(d.pmf[j - 1] == 0.0);
  CHECK(d.tail_mass == 0.0);
}

TEST_CASE("age of the transmitted packet is truncated geometric") {
  const double rate = 0.4;
  const std::uint32_t n = 6;
  const std::vector<double> pmf = terminal_age_pmf(rate, n);
  REQUIRE(pmf.size() == n + 1);
  double total = 0.0;
  for (double p : pmf) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::uint32_t j = 1; j <= n; ++j)
    CHECK(pmf[j - 1] ==
          doctest::Approx(rate * std::pow(1 - rate, j - 1)).epsilon(1e-12));
  CHECK(pmf[n] == doctest::Approx(std::pow(1 - rate, n)).epsilon(1e-12));
}

TEST_CASE("peak-age formula for a fixed-interval served queue") {
  // 1/lambda for sampling plus the half-sum service and wait terms.
  CHECK(paoi_deterministic_service(0.225, 0.25) ==
        doctest::Approx(1.0 / 0.225 + 0.5 * (1.0 / 0.025 + 4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(paoi_deterministic_service(0.3, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(paoi_deterministic_service(0.5, 0.4), std::invalid_argument);
}

TEST_CASE("near-saturation shares split the spare capacity evenly") {
  const std::vector<double> lambda = {0.1, 0.3, 0.45};  // spare 0.15
  const std::vector<double> beta = heavy_traffic_beta(lambda);
  double total = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    CHECK(beta[i] == doctest::Approx(lambda[i] + 0.05).epsilon(1e-12));
    total += beta[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(heavy_traffic_bound(lambda) ==
        doctest::Approx(rate_objective(lambda, beta)).epsilon(1e-12));
}

TEST_CASE("two-slot greedy counterexample at the canonical point") {
  const TwoSlotCase c{0.01, 3.0, 4.0, 1.0, 10.0};
  const TwoSlotComparison r = myopic_two_slot_comparison(c);
  CHECK(r.myopic == doctest::Approx(3.260025).epsilon(1e-12));
  CHECK(r.alternative == doctest::Approx(2.7675).epsilon(1e-12));
  CHECK(r.gap == doctest::Approx(0.492525).epsilon(1e-12));
  CHECK(r.gap > 0.0);  // the greedy schedule really is strictly worse

  // The closed forms must equal the direct enumeration bit-for-bit-ish.
  CHECK(std::fabs(r.myopic - enumerate_two_slot(c, true)) < 1e-12);
  CHECK(std::fabs(r.alternative - enumerate_two_slot(c, false)) < 1e-12);
}

TEST_CASE("two-slot closed forms equal enumeration across the valid region") {
  RngStream rng(20260816, 11);
  for (int i = 0; i < 300; ++i) {
    const TwoSlotCase c = sample_valid_case(rng);
    const TwoSlotComparison r = myopic_two_slot_comparison(c);
    REQUIRE(std::fabs(r.myopic - enumerate_two_slot(c, true)) < 1e-12);
    REQUIRE(std::fabs(r.alternative - enumerate_two_slot(c, false)) < 1e-12);
  }
}

TEST_CASE("two-slot validity conditions are enforced") {
  const TwoSlotCase good{0.01, 3.0, 4.0, 1.0, 10.0};
  CHECK_NOTHROW(good.validate());

  TwoSlotCase c = good;
  c.delta = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = good;
  c.g1 = 1.9;  // below half of g2
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = good;
  c.g1 = 4.0;  // not strictly below g2
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = good;
  c.h2 = 4.9;  // h2 - g2 must exceed h1
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = good;
  c.h2 = 5.5;  // h2 + 1 - g2 falls below g1: slot-2 greedy would flip
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = good;
  c.g2 = 3.5;
  c.g1 = 3.0;
  c.h1 = 2.8;  // g2 below h1 + 1 lets the replaced packet outbid g2
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
