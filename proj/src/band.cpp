#include "polab/band.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polab/errors.hpp"

namespace polab {
namespace {

void require_defined(const ScoreGeometry& geom) {
  if (!geom.defined)
    throw DegenerateError("score geometry undefined (zero-norm score direction)");
}

}  // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::BothDecrease:
      return "both_decrease";
    case Regime::Disentangled:
      return "disentangled";
    case Regime::BothIncrease:
      return "both_increase";
    case Regime::Degenerate:
      return "degenerate";
  }
  return "degenerate";
}

std::optional<Regime> regime_from_name(std::string_view name) {
  if (name == "both_decrease") return Regime::BothDecrease;
  if (name == "disentangled") return Regime::Disentangled;
  if (name == "both_increase") return Regime::BothIncrease;
  if (name == "degenerate") return Regime::Degenerate;
  return std::nullopt;
}

RatePrediction predict_rates(const ScoreGeometry& geom, const IncentivePair& d) {
  require_defined(geom);
  RatePrediction r;
  r.zdot_w = d.d_w * geom.norm_w * geom.norm_w - d.d_l * geom.inner;
  r.zdot_l = d.d_w * geom.inner - d.d_l * geom.norm_l * geom.norm_l;
  r.mdot = r.zdot_w - r.zdot_l;
  return r;
}

double robust_center(const ScoreGeometry& geom) {
  require_defined(geom);
  return std::log(geom.norm_l / geom.norm_w);
}

BandState compute_band(const ScoreGeometry& geom, const IncentivePair& d,
                       double tie_eps) {
  require_defined(geom);
  BandState b;
  b.rho = geom.rho;
  b.log_r_star = robust_center(geom);
  if (geom.rho > 0.0) {
    const double half_width = -std::log(geom.rho);  // >= 0, 0 at rho == 1
    b.log_lower = b.log_r_star - half_width;
    b.log_upper = b.log_r_star + half_width;
  }
  if (d.d_w > 0.0 && d.d_l > 0.0) {
    b.log_r = std::log(d.d_w / d.d_l);
    if (b.log_lower) {
      b.slack = std::min(*b.log_r - *b.log_lower, *b.log_upper - *b.log_r);
    } else {
      b.slack = std::numeric_limits<double>::infinity();
    }
  }
  b.regime = classify_regime(geom, d, tie_eps);
  return b;
}

Regime classify_regime(const ScoreGeometry& geom, const IncentivePair& d,
                       double tie_eps) {
  if (!geom.defined) return Regime::Degenerate;
  if (!(d.d_w > 0.0) || !(d.d_l > 0.0)) return Regime::Degenerate;
  if (geom.rho <= 0.0) return Regime::Disentangled;
  const double center = std::log(geom.norm_l / geom.norm_w);
  const double half_width = -std::log(geom.rho);
  const double log_r = std::log(d.d_w / d.d_l);
  if (log_r < center - half_width - tie_eps) return Regime::BothDecrease;
  if (log_r > center + half_width + tie_eps) return Regime::BothIncrease;
  return Regime::Disentangled;
}

}  // namespace polab
