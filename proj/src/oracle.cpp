#include "polab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polab/errors.hpp"

namespace polab {
namespace oracle {
namespace {

void refuse_near_kinks(const ObjectiveSpec& spec, const LossInputs& in, double h) {
  const double guard = 2.0 * h;
  if (const auto* o = std::get_if<Rrhf>(&spec)) {
    (void)o;
    if (std::abs(in.margin()) <= guard)
      throw KinkError("input within " + std::to_string(guard) + " of the rrhf kink");
  }
  if (const auto* o = std::get_if<SlicHf>(&spec)) {
    if (std::abs(in.margin() - o->gamma) <= guard)
      throw KinkError("input within " + std::to_string(guard) + " of the slic_hf kink");
  }
  if (std::holds_alternative<Ddro>(spec)) {
    if (in.zt_l() + guard >= std::numbers::ln2 - kDdroDomainEps)
      throw KinkError("input within " + std::to_string(guard) +
                      " of the ddro domain boundary");
  }
}

double total_loss(const TabularPolicy& policy, const ObjectiveSpec& spec,
                  const Triplet& t, const TabularPolicy& reference) {
  const bool weighted = uses_token_weights(spec);
  LossInputs in;
  in.z_w = log_prob(policy, t.prompt, t.winner, triplet_weights(t, true, weighted));
  in.z_l = log_prob(policy, t.prompt, t.loser, triplet_weights(t, false, weighted));
  in.z_w_ref =
      log_prob(reference, t.prompt, t.winner, triplet_weights(t, true, weighted));
  in.z_l_ref =
      log_prob(reference, t.prompt, t.loser, triplet_weights(t, false, weighted));
  in.len_w = static_cast<int>(t.winner.size());
  in.len_l = static_cast<int>(t.loser.size());
  return loss(spec, in);
}

}  // namespace

IncentivePair fd_loss_grads(const ObjectiveSpec& spec, const LossInputs& in, double h) {
  if (!(h > 0.0)) throw DomainError("fd step h must be positive");
  refuse_near_kinks(spec, in, h);
  LossInputs p = in, m = in;
  p.z_w = in.z_w + h;
  m.z_w = in.z_w - h;
  const double d_w_hat = -(loss(spec, p) - loss(spec, m)) / (2.0 * h);
  p = in;
  m = in;
  p.z_l = in.z_l + h;
  m.z_l = in.z_l - h;
  const double d_l_hat = (loss(spec, p) - loss(spec, m)) / (2.0 * h);
  return {d_w_hat, d_l_hat};
}

FlatGrad fd_param_grad(const TabularPolicy& policy, const ObjectiveSpec& spec,
                       const Triplet& triplet, const TabularPolicy& reference,
                       double h) {
  if (!(h > 0.0)) throw DomainError("fd step h must be positive");
  const int rows = static_cast<int>(
      std::max(triplet.winner.size(), triplet.loser.size()));
  FlatGrad g;
  g.prompt = triplet.prompt;
  g.vocab = policy.vocab;
  g.values.resize(static_cast<std::size_t>(rows) * policy.vocab);

  TabularPolicy probe = policy;
  for (int t = 0; t < rows; ++t) {
    for (int v = 0; v < policy.vocab; ++v) {
      auto row = probe.row(triplet.prompt, t);
      const double saved = row[static_cast<std::size_t>(v)];
      row[static_cast<std::size_t>(v)] = saved + h;
      const double up = total_loss(probe, spec, triplet, reference);
      row[static_cast<std::size_t>(v)] = saved - h;
      const double down = total_loss(probe, spec, triplet, reference);
      row[static_cast<std::size_t>(v)] = saved;
      g.values[static_cast<std::size_t>(t) * policy.vocab + v] =
          (up - down) / (2.0 * h);
    }
  }
  return g;
}

double fd_log_prob_grad(const TabularPolicy& policy, int prompt,
                        std::span<const int> y, std::span<const double> weights,
                        int pos, int token, double h) {
  TabularPolicy probe = policy;
  auto row = probe.row(prompt, pos);
  const double saved = row[static_cast<std::size_t>(token)];
  row[static_cast<std::size_t>(token)] = saved + h;
  const double up = log_prob(probe, prompt, y, weights);
  row[static_cast<std::size_t>(token)] = saved - h;
  const double down = log_prob(probe, prompt, y, weights);
  return (up - down) / (2.0 * h);
}

double slack_eval(const ScoreGeometry& geom, double log_r) {
  const double r = std::exp(log_r);
  return std::min(std::log(r * geom.norm_w / (geom.rho * geom.norm_l)),
                  std::log(geom.norm_l / (geom.rho * r * geom.norm_w)));
}

double slack_grid_argmax(const ScoreGeometry& geom, int n_points) {
  if (!geom.defined || !(geom.rho > 0.0) || !(geom.rho < 1.0))
    throw DegenerateError("slack grid search requires rho in (0, 1)");
  if (n_points < 2) throw DomainError("grid needs at least two points");
  const double lo = std::log(geom.rho * geom.norm_l / geom.norm_w);
  const double hi = std::log(geom.norm_l / (geom.rho * geom.norm_w));
  double best_x = lo;
  double best = slack_eval(geom, lo);
  for (int i = 1; i < n_points; ++i) {
    const double x = lo + (hi - lo) * i / (n_points - 1);
    const double s = slack_eval(geom, x);
    if (s > best) {
      best = s;
      best_x = x;
    }
  }
  return best_x;
}

std::vector<RateProbe> euler_rate_probe(const TabularPolicy& policy,
                                        const ObjectiveSpec& spec,
                                        const Triplet& triplet,
                                        const TabularPolicy& reference,
                                        std::span<const double> etas) {
  const bool weighted = uses_token_weights(spec);
  const auto w_w = triplet_weights(triplet, true, weighted);
  const auto w_l = triplet_weights(triplet, false, weighted);

  LossInputs in;
  in.z_w = log_prob(policy, triplet.prompt, triplet.winner, w_w);
  in.z_l = log_prob(policy, triplet.prompt, triplet.loser, w_l);
  in.z_w_ref = log_prob(reference, triplet.prompt, triplet.winner, w_w);
  in.z_l_ref = log_prob(reference, triplet.prompt, triplet.loser, w_l);
  in.len_w = static_cast<int>(triplet.winner.size());
  in.len_l = static_cast<int>(triplet.loser.size());
  const IncentivePair d = incentives(spec, in);

  const ScoreVec s_w = score(policy, triplet.prompt, triplet.winner, w_w);
  const ScoreVec s_l = score(policy, triplet.prompt, triplet.loser, w_l);

  std::vector<RateProbe> probes;
  probes.reserve(etas.size());
  for (double eta : etas) {
    if (!(eta > 0.0)) throw DomainError("probe etas must be positive");
    TabularPolicy displaced = policy;
    for (int t = 0; t < s_w.length(); ++t) {
      auto row = displaced.row(triplet.prompt, t);
      const auto src = s_w.row(t);
      for (int v = 0; v < displaced.vocab; ++v)
        row[static_cast<std::size_t>(v)] +=
            eta * d.d_w * src[static_cast<std::size_t>(v)];
    }
    for (int t = 0; t < s_l.length(); ++t) {
      auto row = displaced.row(triplet.prompt, t);
      const auto src = s_l.row(t);
      for (int v = 0; v < displaced.vocab; ++v)
        row[static_cast<std::size_t>(v)] -=
            eta * d.d_l * src[static_cast<std::size_t>(v)];
    }
    RateProbe p;
    p.zdot_w =
        (log_prob(displaced, triplet.prompt, triplet.winner, w_w) - in.z_w) / eta;
    p.zdot_l =
        (log_prob(displaced, triplet.prompt, triplet.loser, w_l) - in.z_l) / eta;
    probes.push_back(p);
  }
  return probes;
}

}  // namespace oracle
}  // namespace polab
