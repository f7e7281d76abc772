#pragma once

// Static SVG line charts for a trajectory: likelihoods, margin, and
// band-vs-log_r. Charting is best-effort; failures never fail a run.

#include <string>

#include "polab/dynamics.hpp"

namespace polab {

// Writes <stem>_likelihoods.svg, <stem>_margin.svg and <stem>_band.svg.
// Returns false (after logging to stderr) on any error.
bool write_charts(const Trajectory& traj, const std::string& stem);

}  // namespace polab
