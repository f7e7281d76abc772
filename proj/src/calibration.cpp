#include "polab/calibration.hpp"

#include <algorithm>
#include <cmath>

namespace polab {
namespace {

// Floored log: exact for values >= eps, finite at 0. An additive eps would
// perturb every log by ~eps/value and break exact centering at momentum 0.
double log_floored(double value, double eps) {
  return std::log(std::max(value, eps));
}

void ema_step(double& ema, double observation, double momentum, bool initialized) {
  ema = initialized ? momentum * ema + (1.0 - momentum) * observation : observation;
}

}  // namespace

CalibrationResult rc_update(RcState& state, const IncentivePair& d,
                            const ScoreGeometry& geom) {
  CalibrationResult res;
  if (!(d.d_w > 0.0) || !(d.d_l > 0.0) || !geom.defined) {
    res.alpha = 1.0;
    res.d_w_rc = d.d_w;
    res.d_l_rc = d.d_l;
    res.log_r_rc = 0.0;
    res.passthrough = true;
    return res;
  }

  const bool init = state.initialized;
  ema_step(state.ema_log_dw, log_floored(d.d_w, state.eps), state.momentum, init);
  ema_step(state.ema_log_dl, log_floored(d.d_l, state.eps), state.momentum, init);
  ema_step(state.ema_log_nw, log_floored(geom.norm_w, state.eps), state.momentum, init);
  ema_step(state.ema_log_nl, log_floored(geom.norm_l, state.eps), state.momentum, init);
  state.initialized = true;

  const double ema_log_r_star = state.ema_log_nl - state.ema_log_nw;
  const double ema_log_r = state.ema_log_dw - state.ema_log_dl;
  double delta = ema_log_r_star - ema_log_r;

  const double log_r_now = std::log(d.d_w / d.d_l);
  if (state.clip_enabled) {
    // Band interval for Delta, using the instantaneous rho. Only rho in
    // (0, 1] constrains; rho <= 0 leaves every ratio feasible.
    if (geom.rho > 0.0) {
      const double center = state.clip_center_instantaneous
                                ? std::log(geom.norm_l / geom.norm_w)
                                : ema_log_r_star;
      const double log_rho = std::log(geom.rho);  // <= 0
      const double lo = center - log_r_now + log_rho;
      const double hi = center - log_r_now - log_rho;
      const double clipped = std::clamp(delta, lo, hi);
      if (clipped != delta) {
        delta = clipped;
        res.clipped = true;
      }
    }
    const double cap = 2.0 * state.alpha_cap;
    const double capped = std::clamp(delta, -cap, cap);
    if (capped != delta) {
      delta = capped;
      res.clipped = true;
    }
  }

  res.alpha = std::exp(0.5 * delta);
  res.d_w_rc = res.alpha * d.d_w;
  res.d_l_rc = d.d_l / res.alpha;
  res.log_r_rc = log_r_now + delta;
  return res;
}

void rc_reset(RcState& state) {
  state.ema_log_dw = 0.0;
  state.ema_log_dl = 0.0;
  state.ema_log_nw = 0.0;
  state.ema_log_nl = 0.0;
  state.initialized = false;
}

}  // namespace polab
