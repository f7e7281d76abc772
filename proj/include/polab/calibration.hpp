#pragma once

/**
 * Plug-and-play reward calibration: rescale the incentive pair by
 * alpha = exp(Delta / 2) with Delta = EMA[log r*] - EMA[log r], so the
 * realized log incentive ratio tracks the band center log(||s_l||/||s_w||).
 * Forward loss values are untouched; only the backward weights change.
 *
 * Smoothing is a log-domain EMA over d_w, d_l, ||s_w||, ||s_l||, seeded by
 * the first observation. With clipping on, Delta is first clipped to the
 * instantaneous-rho band interval around the configured center, then to the
 * |log alpha| <= alpha_cap backstop.
 */

#include "polab/band.hpp"
#include "polab/objectives.hpp"
#include "polab/policy.hpp"

namespace polab {

struct RcState {
  double momentum = 0.9;      // EMA momentum, in [0, 1)
  double eps = 1e-12;         // floor inside the logs
  double alpha_cap = 10.0;    // max |log alpha|
  bool clip_enabled = true;
  // Clip interval centered on EMA[log r*] (as printed) or on the
  // instantaneous log r*.
  bool clip_center_instantaneous = false;

  double ema_log_dw = 0.0;
  double ema_log_dl = 0.0;
  double ema_log_nw = 0.0;
  double ema_log_nl = 0.0;
  bool initialized = false;
};

struct CalibrationResult {
  double alpha = 1.0;
  double d_w_rc = 0.0;  // alpha * d_w
  double d_l_rc = 0.0;  // d_l / alpha
  double log_r_rc = 0.0;  // log(d_w/d_l) + 2 log alpha; meaningless on passthrough
  bool clipped = false;
  bool passthrough = false;
};

// One calibration step: update EMAs, derive alpha, rescale. Nonpositive
// incentives or undefined geometry skip the step entirely (alpha = 1,
// incentives unchanged, EMAs untouched) with the passthrough flag set.
CalibrationResult rc_update(RcState& state, const IncentivePair& d,
                            const ScoreGeometry& geom);

// Clears the EMAs and the initialized flag; configuration is preserved.
void rc_reset(RcState& state);

}  // namespace polab
