#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polab/band.hpp"
#include "polab/errors.hpp"
#include "polab/oracle.hpp"
#include "polab/rng.hpp"

using namespace polab;

namespace {

ScoreGeometry geom_of(double norm_w, double norm_l, double rho) {
  ScoreGeometry g;
  g.norm_w = norm_w;
  g.norm_l = norm_l;
  g.rho = rho;
  g.inner = rho * norm_w * norm_l;
  g.defined = norm_w > 0.0 && norm_l > 0.0;
  return g;
}

}  // namespace

TEST_CASE("predict_rates: dropped coupling and symmetric margin growth") {
  const ScoreGeometry g = geom_of(1.3, 0.9, 0.4);

  const RatePrediction free = predict_rates(g, {0.7, 0.0});
  CHECK(free.zdot_w == doctest::Approx(0.7 * 1.3 * 1.3).epsilon(1e-14));
  CHECK(free.zdot_l == doctest::Approx(0.7 * g.inner).epsilon(1e-14));

  // d_w = d_l = d: mdot = d * ||s_w - s_l||^2 >= 0.
  const double d = 0.55;
  const RatePrediction sym = predict_rates(g, {d, d});
  const double expect =
      d * (g.norm_w * g.norm_w + g.norm_l * g.norm_l - 2.0 * g.inner);
  CHECK(sym.mdot == doctest::Approx(expect).epsilon(1e-12));
  CHECK(sym.mdot >= 0.0);
  CHECK(sym.mdot == sym.zdot_w - sym.zdot_l);  // bitwise by construction
}

TEST_CASE("predict_rates requires defined geometry") {
  ScoreGeometry g;  // defined = false
  CHECK_THROWS_AS((void)predict_rates(g, {1.0, 1.0}), DegenerateError);
  CHECK_THROWS_AS((void)robust_center(g), DegenerateError);
  CHECK_THROWS_AS((void)compute_band(g, {1.0, 1.0}), DegenerateError);
}

TEST_CASE("compute_band: direct substitution at rho = 1/2") {
  const ScoreGeometry g = geom_of(1.0, 1.0, 0.5);
  const BandState b = compute_band(g, {1.0, 1.0});
  CHECK(*b.log_lower == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
  CHECK(*b.log_upper == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(b.log_r_star == 0.0);
  CHECK(*b.log_r == 0.0);
  CHECK(b.regime == Regime::Disentangled);
  CHECK(*b.slack == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("compute_band: rho = 1 collapses the band to its center") {
  const ScoreGeometry g = geom_of(0.8, 1.6, 1.0);
  const BandState b = compute_band(g, {2.0, 1.0});
  CHECK(*b.log_lower == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(*b.log_upper == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  // log_r = log 2 hits the collapsed band exactly.
  CHECK(b.regime == Regime::Disentangled);

  const BandState off = compute_band(g, {1.0, 1.0});
  CHECK(off.regime == Regime::BothDecrease);
}

TEST_CASE("compute_band: regime thresholds on the ratio axis") {
  const ScoreGeometry g = geom_of(1.0, 1.0, 0.5);
  CHECK(compute_band(g, {3.0, 1.0}).regime == Regime::BothIncrease);  // 3 > 1/rho
  CHECK(compute_band(g, {1.0, 4.0}).regime == Regime::BothDecrease);  // 1/4 < rho
  CHECK(compute_band(g, {1.0, 1.0}).regime == Regime::Disentangled);
  // Exactly at the lower threshold: closed middle interval wins.
  CHECK(compute_band(g, {0.5, 1.0}).regime == Regime::Disentangled);
}

TEST_CASE("compute_band: nonpositive incentives degrade to Degenerate") {
  const ScoreGeometry g = geom_of(1.0, 1.0, 0.5);
  const BandState b = compute_band(g, {0.0, 1.0});
  CHECK(b.regime == Regime::Degenerate);
  CHECK_FALSE(b.log_r.has_value());
  CHECK_FALSE(b.slack.has_value());
  CHECK(b.log_lower.has_value());  // geometry-only fields stay populated

  const BandState neg = compute_band(g, {-0.3, 1.0});
  CHECK(neg.regime == Regime::Degenerate);
}

TEST_CASE("compute_band: rho <= 0 leaves the band unbounded and disentangled") {
  const ScoreGeometry g = geom_of(1.0, 2.0, -0.3);
  const BandState b = compute_band(g, {5.0, 0.01});
  CHECK_FALSE(b.log_lower.has_value());
  CHECK_FALSE(b.log_upper.has_value());
  CHECK(std::isinf(*b.slack));
  CHECK(b.regime == Regime::Disentangled);

  // Sign analysis backs the label for any positive incentives.
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const ScoreGeometry gg =
        geom_of(std::exp(rng.uniform(-1.0, 1.0)), std::exp(rng.uniform(-1.0, 1.0)),
                rng.uniform(-0.99, 0.0));
    const IncentivePair d{std::exp(rng.uniform(-2.0, 2.0)),
                          std::exp(rng.uniform(-2.0, 2.0))};
    const RatePrediction r = predict_rates(gg, d);
    CHECK(r.zdot_w >= 0.0);
    CHECK(r.zdot_l <= 0.0);
    CHECK(classify_regime(gg, d) == Regime::Disentangled);
  }
}

TEST_CASE("robust_center: values and grid-search agreement") {
  CHECK(robust_center(geom_of(1.0, 1.0, 0.5)) == 0.0);
  CHECK(robust_center(geom_of(1.0, 2.0, 0.5)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));

  Rng rng(22);
  for (int i = 0; i < 50; ++i) {
    const ScoreGeometry g =
        geom_of(std::exp(rng.uniform(-1.5, 1.5)), std::exp(rng.uniform(-1.5, 1.5)),
                rng.uniform(0.05, 0.95));
    const int n = 10001;
    const double cell = -2.0 * std::log(g.rho) / (n - 1);
    const double argmax = oracle::slack_grid_argmax(g, n);
    CHECK(std::abs(argmax - robust_center(g)) <= 2.0 * cell);
  }
}

TEST_CASE("band width and center-slack laws") {
  Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    const ScoreGeometry g =
        geom_of(std::exp(rng.uniform(-1.5, 1.5)), std::exp(rng.uniform(-1.5, 1.5)),
                rng.uniform(0.01, 1.0));
    const IncentivePair d{std::exp(rng.uniform(-1.0, 1.0)),
                          std::exp(rng.uniform(-1.0, 1.0))};
    const BandState b = compute_band(g, d);
    REQUIRE(b.log_lower.has_value());
    CHECK(std::abs((*b.log_upper - *b.log_lower) - (-2.0 * std::log(g.rho))) <=
          1e-12);
    CHECK(*b.log_lower <= b.log_r_star + 1e-15);
    CHECK(b.log_r_star <= *b.log_upper + 1e-15);

    // Slack sign characterizes membership.
    const bool inside = *b.log_r >= *b.log_lower && *b.log_r <= *b.log_upper;
    CHECK((*b.slack >= 0.0) == inside);

    // At the center the slack is the half-width.
    const IncentivePair centered{g.norm_l / g.norm_w, 1.0};
    const BandState cb = compute_band(g, centered);
    CHECK(std::abs(*cb.slack - (-std::log(g.rho))) <= 1e-12);
  }
}

TEST_CASE("classify_regime agrees with rate signs away from thresholds") {
  Rng rng(24);
  int tested = 0;
  while (tested < 10000) {
    const ScoreGeometry g =
        geom_of(std::exp(rng.uniform(-1.5, 1.5)), std::exp(rng.uniform(-1.5, 1.5)),
                rng.uniform(0.02, 0.999));
    const IncentivePair d{std::exp(rng.uniform(-2.0, 2.0)),
                          std::exp(rng.uniform(-2.0, 2.0))};
    const double log_r = std::log(d.d_w / d.d_l);
    const double center = std::log(g.norm_l / g.norm_w);
    const double hw = -std::log(g.rho);
    if (std::abs(log_r - (center - hw)) < 1e-9 ||
        std::abs(log_r - (center + hw)) < 1e-9)
      continue;
    ++tested;
    const RatePrediction r = predict_rates(g, d);
    switch (classify_regime(g, d)) {
      case Regime::BothDecrease:
        CHECK(r.zdot_w < 0.0);
        CHECK(r.zdot_l < 0.0);
        break;
      case Regime::Disentangled:
        CHECK(r.zdot_w >= 0.0);
        CHECK(r.zdot_l <= 0.0);
        break;
      case Regime::BothIncrease:
        CHECK(r.zdot_w > 0.0);
        CHECK(r.zdot_l > 0.0);
        break;
      case Regime::Degenerate:
        FAIL("degenerate label on positive incentives and defined geometry");
    }
  }
}

TEST_CASE("classify_regime degrades instead of throwing") {
  ScoreGeometry undefined;
  CHECK(classify_regime(undefined, {1.0, 1.0}) == Regime::Degenerate);
  const ScoreGeometry g = geom_of(1.0, 1.0, 0.5);
  CHECK(classify_regime(g, {1.0, 0.0}) == Regime::Degenerate);
  CHECK(classify_regime(g, {-1.0, 1.0}) == Regime::Degenerate);
}

TEST_CASE("regime names round-trip") {
  for (Regime r : {Regime::BothDecrease, Regime::Disentangled, Regime::BothIncrease,
                   Regime::Degenerate})
    CHECK(regime_from_name(regime_name(r)) == r);
  CHECK_FALSE(regime_from_name("nonsense").has_value());
}
