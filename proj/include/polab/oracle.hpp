#pragma once

/**
 * Brute-force verifiers, independent of the analytic paths they check:
 * central finite differences for incentives and parameter gradients, grid
 * search for the band slack maximizer, and Euler probes for the first-order
 * likelihood rates. Used by the unit/acceptance tests and by `polab verify`.
 */

#include <span>
#include <vector>

#include "polab/objectives.hpp"
#include "polab/policy.hpp"

namespace polab {
namespace oracle {

// Central differences of the loss in (z_w, z_l): returns (-dL/dz_w, +dL/dz_l).
// Throws KinkError within 2h of a hinge kink or the DDRO domain boundary.
IncentivePair fd_loss_grads(const ObjectiveSpec& spec, const LossInputs& in, double h);

// Central-difference gradient of the total loss with respect to every logit
// the triplet can touch. Values are laid out like a ScoreVec over rows
// 0..max(len_w, len_l)-1 of the triplet's prompt.
struct FlatGrad {
  int prompt = -1;
  int vocab = 0;
  std::vector<double> values;  // rows * vocab
};
FlatGrad fd_param_grad(const TabularPolicy& policy, const ObjectiveSpec& spec,
                       const Triplet& triplet, const TabularPolicy& reference,
                       double h);

// Central difference of log_prob with respect to one logit.
double fd_log_prob_grad(const TabularPolicy& policy, int prompt,
                        std::span<const int> y, std::span<const double> weights,
                        int pos, int token, double h);

// Log-distance from log_r to the nearer band edge, written directly from the
// min-of-two-logs form (not via the band module).
double slack_eval(const ScoreGeometry& geom, double log_r);

// Grid argmax of slack_eval over the band, n_points uniform points. Requires
// rho in (0, 1); throws DegenerateError otherwise.
double slack_grid_argmax(const ScoreGeometry& geom, int n_points);

// Discrete rate estimates (z(theta + eta u) - z(theta)) / eta along the
// assembled update direction u = d_w s_w - d_l s_l, one entry per eta.
struct RateProbe {
  double zdot_w = 0.0;
  double zdot_l = 0.0;
};
std::vector<RateProbe> euler_rate_probe(const TabularPolicy& policy,
                                        const ObjectiveSpec& spec,
                                        const Triplet& triplet,
                                        const TabularPolicy& reference,
                                        std::span<const double> etas);

// Default probe step sizes: h = 1e-5 in parameter space, 1e-6 in z space.
inline constexpr double kParamH = 1e-5;
inline constexpr double kLossH = 1e-6;

}  // namespace oracle
}  // namespace polab
