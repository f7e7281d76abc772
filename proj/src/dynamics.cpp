#include "polab/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "polab/errors.hpp"
#include "polab/kernels.hpp"
#include "polab/rng.hpp"

namespace polab {
namespace {

void check_finite(double v, const char* what, std::int64_t step) {
  if (!std::isfinite(v))
    throw NonFiniteError("non-finite " + std::string(what) + " at step " +
                         std::to_string(step) + ": " + std::to_string(v));
}

void apply_update(TabularPolicy& policy, const Triplet& t, const ScoreVec& s_w,
                  const ScoreVec& s_l, double cw, double cl) {
  for (int pos = 0; pos < s_w.length(); ++pos)
    if (cw != 0.0) kernels::axpy(cw, s_w.row(pos), policy.row(t.prompt, pos));
  for (int pos = 0; pos < s_l.length(); ++pos)
    if (cl != 0.0) kernels::axpy(cl, s_l.row(pos), policy.row(t.prompt, pos));
}

}  // namespace

TrajectoryPoint train_step(TabularPolicy& policy, const ObjectiveSpec& spec,
                           const Triplet& triplet, const TabularPolicy& reference,
                           double eta, RcState* rc, const StepOptions& opts) {
  if (!(eta >= 0.0)) throw DomainError("eta must be nonnegative");

  const bool weighted = uses_token_weights(spec);
  const auto w_w = triplet_weights(triplet, true, weighted);
  const auto w_l = triplet_weights(triplet, false, weighted);

  TrajectoryPoint pt;
  pt.z_w = log_prob(policy, triplet.prompt, triplet.winner, w_w);
  pt.z_l = log_prob(policy, triplet.prompt, triplet.loser, w_l);
  pt.z_w_ref = log_prob(reference, triplet.prompt, triplet.winner, w_w);
  pt.z_l_ref = log_prob(reference, triplet.prompt, triplet.loser, w_l);
  pt.margin = pt.z_w - pt.z_l;
  pt.margin_ref_adjusted = pt.margin - (pt.z_w_ref - pt.z_l_ref);

  LossInputs in;
  in.z_w = pt.z_w;
  in.z_l = pt.z_l;
  in.z_w_ref = pt.z_w_ref;
  in.z_l_ref = pt.z_l_ref;
  in.len_w = static_cast<int>(triplet.winner.size());
  in.len_l = static_cast<int>(triplet.loser.size());

  // Opt-in DDRO clamp: pull zt_l just inside the domain guard instead of
  // erroring out, and flag the step.
  if (opts.ddro_clamp && std::holds_alternative<Ddro>(spec)) {
    const double limit = std::numbers::ln2 - 2.0 * kDdroDomainEps;
    if (in.zt_l() >= limit) {
      in.z_l = in.z_l_ref + limit;
      pt.flags.domain_clamped = true;
    }
  }

  const IncentivePair d = incentives(spec, in);
  pt.d_w = d.d_w;
  pt.d_l = d.d_l;
  pt.loss = loss(spec, in);

  const ScoreVec s_w = score(policy, triplet.prompt, triplet.winner, w_w);
  const ScoreVec s_l = score(policy, triplet.prompt, triplet.loser, w_l);
  const ScoreGeometry geom = score_geometry(s_w, s_l, opts.mask);
  pt.norm_w = geom.norm_w;
  pt.norm_l = geom.norm_l;
  pt.inner = geom.inner;
  if (geom.defined) pt.rho = geom.rho;

  IncentivePair d_eff = d;
  if (rc != nullptr) {
    const CalibrationResult cal = rc_update(*rc, d, geom);
    pt.alpha = cal.alpha;
    pt.flags.clipped = cal.clipped;
    pt.flags.passthrough = cal.passthrough;
    d_eff = {cal.d_w_rc, cal.d_l_rc};
  }
  pt.d_w_rc = d_eff.d_w;
  pt.d_l_rc = d_eff.d_l;

  if (geom.defined) {
    const BandState band = compute_band(geom, d_eff);
    pt.band_lo = band.log_lower;
    pt.band_hi = band.log_upper;
    pt.log_r = band.log_r;
    pt.log_r_star = band.log_r_star;
    pt.slack = band.slack;
    pt.regime = band.regime;
  } else {
    pt.regime = Regime::Degenerate;
  }

  apply_update(policy, triplet, s_w, s_l, eta * d_eff.d_w, -eta * d_eff.d_l);

  check_finite(pt.z_w, "z_w", pt.step);
  check_finite(pt.z_l, "z_l", pt.step);
  check_finite(pt.loss, "loss", pt.step);
  check_finite(pt.d_w, "d_w", pt.step);
  check_finite(pt.d_l, "d_l", pt.step);
  check_finite(pt.d_w_rc, "d_w_rc", pt.step);
  check_finite(pt.d_l_rc, "d_l_rc", pt.step);
  check_finite(pt.norm_w, "norm_w", pt.step);
  check_finite(pt.norm_l, "norm_l", pt.step);
  check_finite(pt.alpha, "alpha", pt.step);
  return pt;
}

Trajectory run_trajectory(const RunConfig& config) {
  config.validate();
  Trajectory traj;
  traj.config = config;

  Corpus corpus = generate(config.corpus);
  RcState rc;
  rc.momentum = config.rc.momentum;
  rc.eps = config.rc.eps;
  rc.alpha_cap = config.rc.alpha_cap;
  rc.clip_enabled = config.rc.clip_enabled;
  rc.clip_center_instantaneous = config.rc.clip_center_instantaneous;

  std::vector<int> order(corpus.triplets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(config.seed);
  rng.shuffle(order);

  StepOptions opts;
  opts.ddro_clamp = config.ddro_clamp;
  if (config.mask) opts.mask = &*config.mask;

  traj.points.reserve(static_cast<std::size_t>(config.steps));
  for (std::int64_t step = 0; step < config.steps; ++step) {
    const int id = order[static_cast<std::size_t>(step % static_cast<std::int64_t>(
                             order.size()))];
    try {
      TrajectoryPoint pt =
          train_step(corpus.policy, config.objective, corpus.triplets[static_cast<std::size_t>(id)],
                     corpus.reference, config.eta, config.rc.enabled ? &rc : nullptr, opts);
      pt.step = step;
      pt.triplet_id = id;
      traj.points.push_back(pt);
    } catch (const NonFiniteError& e) {
      throw NonFiniteError(std::string(e.what()) + " (objective " +
                           objective_name(config.objective) + ", step " +
                           std::to_string(step) + ", triplet " + std::to_string(id) +
                           ")");
    }
  }
  traj.final_policy = std::make_shared<const TabularPolicy>(std::move(corpus.policy));
  return traj;
}

PathwaySummary pathway_summary_points(const std::vector<TrajectoryPoint>& points,
                                      std::int64_t burn_in, double tie_eps) {
  std::int64_t n = 0, dec = 0, dis = 0, inc = 0, deg = 0, in_band_n = 0;
  for (const auto& pt : points) {
    if (pt.step < burn_in) continue;
    ++n;
    switch (pt.regime) {
      case Regime::BothDecrease: ++dec; break;
      case Regime::Disentangled: ++dis; break;
      case Regime::BothIncrease: ++inc; break;
      case Regime::Degenerate: ++deg; break;
    }
    if (pt.slack && *pt.slack >= -tie_eps) ++in_band_n;
  }
  if (n == 0) throw DomainError("no points at or past burn_in");
  PathwaySummary s;
  const double dn = static_cast<double>(n);
  s.fraction_both_decrease = static_cast<double>(dec) / dn;
  s.fraction_disentangled = static_cast<double>(dis) / dn;
  s.fraction_both_increase = static_cast<double>(inc) / dn;
  s.fraction_degenerate = static_cast<double>(deg) / dn;
  s.in_band_fraction = static_cast<double>(in_band_n) / dn;
  s.burn_in = burn_in;
  return s;
}

PathwaySummary pathway_summary(const Trajectory& traj, std::int64_t burn_in,
                               double tie_eps) {
  if (burn_in < 0 || burn_in >= static_cast<std::int64_t>(traj.points.size()))
    throw DomainError("burn_in must be smaller than the trajectory length");
  return pathway_summary_points(traj.points, burn_in, tie_eps);
}

}  // namespace polab
