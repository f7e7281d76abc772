#pragma once

/**
 * Disentanglement-band diagnostics.
 *
 * First-order likelihood dynamics under the incentive-score decomposition:
 *
 *   zdot_w = d_w ||s_w||^2 - d_l <s_w, s_l>
 *   zdot_l = d_w <s_w, s_l> - d_l ||s_l||^2
 *
 * For rho in (0, 1], the sign pattern of (zdot_w, zdot_l) is set by where
 * log r = log(d_w / d_l) falls relative to the band
 *
 *   [log(||s_l||/||s_w||) + log rho,  log(||s_l||/||s_w||) - log rho]
 *
 * whose center log(||s_l||/||s_w||) maximizes the distance to the nearer
 * edge. rho <= 0 makes every positive ratio feasible (unbounded band).
 */

#include <optional>
#include <string_view>

#include "polab/objectives.hpp"
#include "polab/policy.hpp"

namespace polab {

enum class Regime { BothDecrease, Disentangled, BothIncrease, Degenerate };

const char* regime_name(Regime r);
std::optional<Regime> regime_from_name(std::string_view name);

struct RatePrediction {
  double zdot_w = 0.0;
  double zdot_l = 0.0;
  double mdot = 0.0;  // always zdot_w - zdot_l
};

struct BandState {
  // Band edges; unset when rho <= 0 (every positive ratio is feasible).
  std::optional<double> log_lower;
  std::optional<double> log_upper;
  // Realized log(d_w/d_l); unset when an incentive is nonpositive.
  std::optional<double> log_r;
  double log_r_star = 0.0;  // log(||s_l||/||s_w||)
  // min distance from log_r to the edges; +inf on an unbounded band,
  // unset when log_r is.
  std::optional<double> slack;
  Regime regime = Regime::Degenerate;
  double rho = 0.0;
};

inline constexpr double kTieEps = 1e-9;

// Instantaneous rates from Eq. above. Throws DegenerateError on undefined
// geometry.
RatePrediction predict_rates(const ScoreGeometry& geom, const IncentivePair& d);

// Full band state. Nonpositive incentives yield the Degenerate regime with
// log_r/slack unset (geometry-only fields still populated); undefined
// geometry throws DegenerateError.
BandState compute_band(const ScoreGeometry& geom, const IncentivePair& d,
                       double tie_eps = kTieEps);

// log(||s_l||/||s_w||). Throws DegenerateError on undefined geometry.
double robust_center(const ScoreGeometry& geom);

// Regime label alone. Never throws: undefined geometry or nonpositive
// incentives degrade to Degenerate. Ties within tie_eps of an edge resolve
// to Disentangled (closed middle interval).
Regime classify_regime(const ScoreGeometry& geom, const IncentivePair& d,
                       double tie_eps = kTieEps);

inline bool in_band(const BandState& b, double tie_eps = kTieEps) {
  return b.slack.has_value() && *b.slack >= -tie_eps;
}

}  // namespace polab
