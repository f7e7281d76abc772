#pragma once

/**
 * Discrete-time trainer: plain gradient descent on one triplet per step,
 * theta += eta * (d_w * s_w - d_l * s_l), with full per-step diagnostics
 * (log-probs, incentives, score geometry, band state, calibration) and
 * pathway occupancy summaries over whole trajectories.
 */

#include <cstdint>
#include <memory>
#include <vector>

#include "polab/band.hpp"
#include "polab/calibration.hpp"
#include "polab/config.hpp"
#include "polab/data.hpp"
#include "polab/objectives.hpp"
#include "polab/policy.hpp"

namespace polab {

struct StepFlags {
  bool clipped = false;
  bool passthrough = false;
  bool domain_clamped = false;
};

struct TrajectoryPoint {
  std::int64_t step = 0;
  int triplet_id = 0;
  double z_w = 0, z_l = 0, z_w_ref = 0, z_l_ref = 0;
  double margin = 0;               // z_w - z_l
  double margin_ref_adjusted = 0;  // margin - reference margin
  double d_w = 0, d_l = 0;         // raw incentives
  double d_w_rc = 0, d_l_rc = 0;   // effective (calibrated) incentives
  double norm_w = 0, norm_l = 0, inner = 0;
  std::optional<double> rho;  // unset when geometry is degenerate
  std::optional<double> band_lo, band_hi;  // unset when rho <= 0 or degenerate
  std::optional<double> log_r;             // unset when an incentive <= 0
  std::optional<double> log_r_star;        // unset when geometry is degenerate
  std::optional<double> slack;
  Regime regime = Regime::Degenerate;
  double loss = 0;   // forward value at the raw log-probs
  double alpha = 1;  // calibration factor (1 when RC is off or passed through)
  StepFlags flags;
};

struct Trajectory {
  RunConfig config;  // fingerprint: seed, objective, RC settings, eta, steps
  std::vector<TrajectoryPoint> points;
  std::shared_ptr<const TabularPolicy> final_policy;
};

struct PathwaySummary {
  double fraction_both_decrease = 0;
  double fraction_disentangled = 0;
  double fraction_both_increase = 0;
  double fraction_degenerate = 0;
  double in_band_fraction = 0;
  std::int64_t burn_in = 0;
};

struct StepOptions {
  bool ddro_clamp = false;
  const PositionMask* mask = nullptr;  // geometry-only mask
};

// One training step on one triplet. Mutates the policy (and the RC state
// when rc != nullptr); the reference stays frozen. Throws NonFiniteError if
// any recorded diagnostic is non-finite, and propagates objective domain
// errors unless the DDRO clamp is opted in.
TrajectoryPoint train_step(TabularPolicy& policy, const ObjectiveSpec& spec,
                           const Triplet& triplet, const TabularPolicy& reference,
                           double eta, RcState* rc, const StepOptions& opts = {});

// Full run from a config: generates the corpus, visits a seed-shuffled
// triplet order cyclically for config.steps steps. Deterministic given the
// config.
Trajectory run_trajectory(const RunConfig& config);

// Regime occupancy over points with step >= burn_in. Throws DomainError on
// an empty window.
PathwaySummary pathway_summary(const Trajectory& traj, std::int64_t burn_in,
                               double tie_eps = kTieEps);
PathwaySummary pathway_summary_points(const std::vector<TrajectoryPoint>& points,
                                      std::int64_t burn_in,
                                      double tie_eps = kTieEps);

}  // namespace polab
