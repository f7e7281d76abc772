#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "polab/band.hpp"
#include "polab/calibration.hpp"
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

RcState fresh(double momentum, bool clip) {
  RcState s;
  s.momentum = momentum;
  s.clip_enabled = clip;
  return s;
}

}  // namespace

TEST_CASE("momentum 0, no clip: alpha = sqrt(r*/r) and exact centering") {
  RcState s = fresh(0.0, false);
  const CalibrationResult cal = rc_update(s, {4.0, 1.0}, geom_of(1.0, 1.0, 0.5));
  CHECK(cal.alpha == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cal.d_w_rc == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cal.d_l_rc == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(cal.log_r_rc) <= 1e-14);
  CHECK_FALSE(cal.clipped);
  CHECK_FALSE(cal.passthrough);
}

TEST_CASE("ema blend: momentum 0.9, previous 0, new log 1 gives 0.1") {
  RcState s = fresh(0.9, false);
  // Seed the EMAs at zero (values of 1.0 everywhere).
  (void)rc_update(s, {1.0, 1.0}, geom_of(1.0, 1.0, 0.5));
  CHECK(s.ema_log_dw == 0.0);
  // Next observation has log(d_w) = 1.
  (void)rc_update(s, {std::exp(1.0), 1.0}, geom_of(1.0, 1.0, 0.5));
  CHECK(s.ema_log_dw == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("clip: out-of-band delta lands on the half-width") {
  // Equal norms, log r = 0, and a stale EMA pulling delta to 1 > -log rho.
  RcState s2 = fresh(0.9, true);
  (void)rc_update(s2, {std::exp(-10.0 / 9.0 / 2.0), std::exp(10.0 / 9.0 / 2.0)},
                  geom_of(1.0, 1.0, 0.5));
  // Seeded EMA log r = -10/9; next step momentum 0.9 keeps EMA log r = -1 with
  // the new observation log r = 0, so delta = 0 - (-1) = 1 > -log rho.
  const CalibrationResult c2 = rc_update(s2, {1.0, 1.0}, geom_of(1.0, 1.0, 0.5));
  CHECK(c2.clipped);
  CHECK(c2.log_r_rc == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("momentum 0 never needs the band clip") {
  // With momentum 0 the delta centers exactly, which is always in band.
  RcState s = fresh(0.0, true);
  const CalibrationResult cal =
      rc_update(s, {std::exp(4.0), 1.0}, geom_of(1.0, 1.0, 0.5));
  CHECK_FALSE(cal.clipped);
  CHECK(cal.log_r_rc == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("stale ema below the band clips onto the lower edge") {
  RcState s = fresh(0.9, true);
  (void)rc_update(s, {std::exp(5.0 / 9.0), std::exp(-5.0 / 9.0)},
                  geom_of(1.0, 1.0, 0.5));
  // EMA log r decays to 1 while the new observation has log r = 0, so the
  // raw delta -1 exceeds the half-width 0.693 downward.
  const CalibrationResult cal = rc_update(s, {1.0, 1.0}, geom_of(1.0, 1.0, 0.5));
  CHECK(cal.clipped);
  const BandState band = compute_band(geom_of(1.0, 1.0, 0.5), {1.0, 1.0});
  CHECK(cal.log_r_rc == doctest::Approx(*band.log_lower).epsilon(1e-12));
}

TEST_CASE("alpha_cap backstop binds after the band clip") {
  RcState s = fresh(0.0, false);
  s.clip_enabled = true;
  s.alpha_cap = 0.25;  // |log alpha| <= 0.25 -> |delta| <= 0.5
  const CalibrationResult cal =
      rc_update(s, {std::exp(4.0), 1.0}, geom_of(1.0, 1.0, 0.9));
  CHECK(cal.clipped);
  CHECK(std::abs(std::log(cal.alpha)) <= 0.25 + 1e-12);
}

TEST_CASE("product preservation and exact centering over random instances") {
  Rng rng(31);
  double worst_center = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ScoreGeometry g =
        geom_of(std::exp(rng.uniform(-1.5, 1.5)), std::exp(rng.uniform(-1.5, 1.5)),
                rng.uniform(-0.9, 0.95));
    const IncentivePair d{std::exp(rng.uniform(-2.0, 2.0)),
                          std::exp(rng.uniform(-2.0, 2.0))};
    RcState s = fresh(0.0, false);
    const CalibrationResult cal = rc_update(s, d, g);
    worst_center = std::max(worst_center,
                            std::abs(cal.log_r_rc - std::log(g.norm_l / g.norm_w)));
    const double product = cal.d_w_rc * cal.d_l_rc;
    CHECK(product == doctest::Approx(d.d_w * d.d_l).epsilon(4e-16));
  }
  CHECK(worst_center <= 1e-12);
}

TEST_CASE("clipped ratios stay inside the instantaneous band") {
  Rng rng(32);
  for (int i = 0; i < 1000; ++i) {
    const ScoreGeometry g =
        geom_of(std::exp(rng.uniform(-1.5, 1.5)), std::exp(rng.uniform(-1.5, 1.5)),
                rng.uniform(0.02, 0.98));
    const IncentivePair d{std::exp(rng.uniform(-3.0, 3.0)),
                          std::exp(rng.uniform(-3.0, 3.0))};
    RcState s = fresh(0.0, true);
    const CalibrationResult cal = rc_update(s, d, g);
    const BandState band = compute_band(g, d);
    CHECK(cal.log_r_rc >= *band.log_lower - 1e-9);
    CHECK(cal.log_r_rc <= *band.log_upper + 1e-9);
  }
}

TEST_CASE("ema converges geometrically to a constant instance") {
  const ScoreGeometry g = geom_of(1.0, 1.0, 0.5);
  const IncentivePair d{2.0, 1.0};
  const double target = std::log(2.0);

  RcState s = fresh(0.9, false);
  // Seed with a different instance so there is a transient to shed
  // (|initial error| < 1).
  (void)rc_update(s, {1.0, 1.0}, g);
  const int steps =
      static_cast<int>(std::ceil(std::log(1e-6) / std::log(s.momentum)));
  for (int i = 0; i < steps; ++i) (void)rc_update(s, d, g);
  CHECK(std::abs((s.ema_log_dw - s.ema_log_dl) - target) <= 1e-6);
}

TEST_CASE("pass-through on degenerate inputs leaves everything unchanged") {
  const ScoreGeometry g = geom_of(1.0, 1.0, 0.5);
  RcState s = fresh(0.5, true);

  const CalibrationResult zero = rc_update(s, {0.0, 1.0}, g);
  CHECK(zero.passthrough);
  CHECK(zero.alpha == 1.0);
  CHECK(zero.d_w_rc == 0.0);
  CHECK(zero.d_l_rc == 1.0);
  CHECK_FALSE(s.initialized);  // skipped steps do not touch the EMAs

  ScoreGeometry undefined;
  const CalibrationResult deg = rc_update(s, {1.0, 1.0}, undefined);
  CHECK(deg.passthrough);
  CHECK(deg.alpha == 1.0);
  CHECK_FALSE(s.initialized);
}

TEST_CASE("reset: seeding semantics, idempotence, config preservation") {
  RcState s = fresh(0.9, true);
  s.alpha_cap = 3.0;
  (void)rc_update(s, {2.0, 1.0}, geom_of(1.0, 1.0, 0.5));
  CHECK(s.initialized);

  rc_reset(s);
  CHECK_FALSE(s.initialized);
  rc_reset(s);  // idempotent
  CHECK_FALSE(s.initialized);
  CHECK(s.momentum == 0.9);
  CHECK(s.alpha_cap == 3.0);
  CHECK(s.clip_enabled);

  // First update after reset seeds the EMAs with the raw logs, not a decay
  // from zero.
  (void)rc_update(s, {std::exp(2.0), 1.0}, geom_of(1.0, 1.0, 0.5));
  CHECK(s.ema_log_dw == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("clip center switch: ema vs instantaneous") {
  // Make the EMA center differ from the instantaneous one, then verify the
  // switch moves the clip interval.
  const ScoreGeometry hist = geom_of(1.0, std::exp(2.0), 0.5);
  const ScoreGeometry now = geom_of(1.0, 1.0, 0.9);
  const IncentivePair d{std::exp(3.0), 1.0};  // log r = 3, far above both bands

  RcState ema_mode = fresh(0.999, true);
  (void)rc_update(ema_mode, {1.0, 1.0}, hist);
  const CalibrationResult a = rc_update(ema_mode, d, now);

  RcState inst_mode = fresh(0.999, true);
  inst_mode.clip_center_instantaneous = true;
  (void)rc_update(inst_mode, {1.0, 1.0}, hist);
  const CalibrationResult b = rc_update(inst_mode, d, now);

  CHECK(a.clipped);
  CHECK(b.clipped);
  CHECK(a.log_r_rc != b.log_r_rc);
  // The instantaneous mode lands inside the instantaneous band.
  const BandState band = compute_band(now, d);
  CHECK(b.log_r_rc >= *band.log_lower - 1e-9);
  CHECK(b.log_r_rc <= *band.log_upper + 1e-9);
}
