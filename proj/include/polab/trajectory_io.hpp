#pragma once

/**
 * Trajectory persistence. The CSV schema is fixed and versioned
 * (polab.trajectory.v1): a `# polab.trajectory.v1` line, a header line, then
 * one row per step with columns
 *
 *   step, triplet_id, z_w, z_l, z_w_ref, z_l_ref, margin, loss, d_w, d_l,
 *   d_w_rc, d_l_rc, norm_w, norm_l, inner, rho, band_lo, band_hi, log_r,
 *   log_r_star, slack, regime, alpha, flags
 *
 * Floats are %.17e (round-trip exact); unbounded-band and undefined values
 * serialize as empty fields; flags is a |-joined subset of
 * {clipped, passthrough, domain_clamped}.
 */

#include <string>
#include <vector>

#include "polab/dynamics.hpp"

namespace polab {

inline constexpr const char* kTrajectorySchema = "polab.trajectory.v1";

void write_trajectory_csv(const Trajectory& traj, const std::string& path);

// Parses a v1 CSV back into points (margin_ref_adjusted is reconstructed).
std::vector<TrajectoryPoint> read_trajectory_csv(const std::string& path);

// Summary JSON: fingerprint, pathway summary at the configured burn-in, and
// final corpus means of (z_w, z_l, margin) under the trained policy.
void write_summary_json(const Trajectory& traj, const PathwaySummary& summary,
                        const std::string& path);

struct FinalMeans {
  double z_w = 0.0;
  double z_l = 0.0;
  double margin = 0.0;
};
FinalMeans final_corpus_means(const Trajectory& traj);

std::string format_double(double v);  // %.17e

}  // namespace polab
