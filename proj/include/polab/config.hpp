#pragma once

/**
 * Run configuration and the plain-text key-value config format.
 *
 * Files are `section.key = value` lines; `#` starts a comment. See the
 * README for annotated examples covering every objective.
 */

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "polab/data.hpp"
#include "polab/objectives.hpp"
#include "polab/policy.hpp"

namespace polab {

struct RcSettings {
  bool enabled = false;
  double momentum = 0.9;
  double eps = 1e-12;
  bool clip_enabled = true;
  double alpha_cap = 10.0;
  bool clip_center_instantaneous = false;
};

struct OutputSettings {
  std::string csv_path;
  std::string summary_path;
  bool charts = false;
};

struct RunConfig {
  CorpusSpec corpus;
  ObjectiveSpec objective = Dpo{};
  RcSettings rc;
  double eta = 1e-3;
  std::int64_t steps = 100;
  std::int64_t burn_in = -1;  // -1: 10% of steps
  std::uint64_t seed = 0;     // triplet visit order
  OutputSettings outputs;
  bool ddro_clamp = false;  // opt-in clamp of zt_l at the DDRO boundary
  std::optional<PositionMask> mask;

  std::int64_t effective_burn_in() const {
    return burn_in >= 0 ? burn_in : steps / 10;
  }
  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Parse a config file / text. Unknown keys, bad values, and malformed lines
// raise ConfigError with file:line context.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& name);

// Objective factory shared with the sweep grid: kind name plus optional
// hyperparameter overrides (NaN means "keep default").
struct ObjectiveParams {
  double beta = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double lambda_w = std::numeric_limits<double>::quiet_NaN();
  double lambda_l = std::numeric_limits<double>::quiet_NaN();
};
ObjectiveSpec make_objective(const std::string& kind, const ObjectiveParams& params);

struct SweepConfig {
  RunConfig base;
  std::vector<std::string> objectives;
  std::vector<bool> rc_values;          // e.g. {false, true}
  std::vector<std::uint64_t> seeds;
  ObjectiveParams params;               // shared overrides for all kinds
};
SweepConfig parse_sweep_file(const std::string& path);
SweepConfig parse_sweep_text(const std::string& text, const std::string& name);

}  // namespace polab
