#include "polab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polab/errors.hpp"
#include "polab/kernels.hpp"

namespace polab {
namespace {

void check_sequence(const TabularPolicy& policy, int prompt, std::span<const int> y,
                    std::span<const double> weights) {
  if (prompt < 0 || prompt >= policy.prompts)
    throw DomainError("prompt index " + std::to_string(prompt) + " out of range");
  if (y.empty()) throw DomainError("response sequence is empty");
  if (static_cast<int>(y.size()) > policy.positions)
    throw DomainError("response length " + std::to_string(y.size()) +
                      " exceeds position count " + std::to_string(policy.positions));
  for (int tok : y)
    if (tok < 0 || tok >= policy.vocab)
      throw DomainError("token " + std::to_string(tok) + " out of vocab range");
  if (!weights.empty()) {
    if (weights.size() != y.size())
      throw DomainError("weight length " + std::to_string(weights.size()) +
                        " does not match sequence length " + std::to_string(y.size()));
    for (double w : weights)
      if (!(w >= 0.0)) throw DomainError("token weights must be nonnegative");
  }
}

}  // namespace

void TabularPolicy::check_valid() const {
  if (prompts <= 0 || positions <= 0 || vocab <= 0)
    throw DomainError("policy dims must be positive");
  if (logits.size() != static_cast<std::size_t>(prompts) * positions * vocab)
    throw DomainError("logit table size does not match dims");
  for (double v : logits)
    if (!std::isfinite(v)) throw DomainError("non-finite logit entry");
}

double log_prob(const TabularPolicy& policy, int prompt, std::span<const int> y,
                std::span<const double> weights) {
  check_sequence(policy, prompt, y, weights);
  double total = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto r = policy.row(prompt, static_cast<int>(t));
    const double lse = kernels::logsumexp(r);
    const double w = weights.empty() ? 1.0 : weights[t];
    total += w * (r[static_cast<std::size_t>(y[t])] - lse);
  }
  return total;
}

ScoreVec score(const TabularPolicy& policy, int prompt, std::span<const int> y,
               std::span<const double> weights) {
  check_sequence(policy, prompt, y, weights);
  ScoreVec s;
  s.prompt = prompt;
  s.vocab = policy.vocab;
  s.rows.resize(y.size() * static_cast<std::size_t>(policy.vocab));
  std::vector<double> probs(static_cast<std::size_t>(policy.vocab));
  for (std::size_t t = 0; t < y.size(); ++t) {
    kernels::softmax(policy.row(prompt, static_cast<int>(t)), probs);
    const double w = weights.empty() ? 1.0 : weights[t];
    std::span<double> out{s.rows.data() + t * policy.vocab,
                          static_cast<std::size_t>(policy.vocab)};
    kernels::scale(-w, probs, out);
    out[static_cast<std::size_t>(y[t])] += w;
  }
  return s;
}

ScoreGeometry score_geometry(const ScoreVec& s_w, const ScoreVec& s_l,
                             const PositionMask* mask) {
  const auto in_mask = [&](int t) {
    return mask == nullptr || (t >= mask->lo && t < mask->hi);
  };

  ScoreGeometry g;
  double nw2 = 0.0, nl2 = 0.0;
  for (int t = 0; t < s_w.length(); ++t)
    if (in_mask(t)) nw2 += kernels::sumsq(s_w.row(t));
  for (int t = 0; t < s_l.length(); ++t)
    if (in_mask(t)) nl2 += kernels::sumsq(s_l.row(t));
  g.norm_w = std::sqrt(nw2);
  g.norm_l = std::sqrt(nl2);

  // Scores from different prompts occupy disjoint blocks of the table.
  if (s_w.prompt == s_l.prompt && s_w.vocab == s_l.vocab) {
    const int shared = std::min(s_w.length(), s_l.length());
    for (int t = 0; t < shared; ++t)
      if (in_mask(t)) g.inner += kernels::dot(s_w.row(t), s_l.row(t));
  }

  if (g.norm_w > 0.0 && g.norm_l > 0.0) {
    g.defined = true;
    g.rho = std::clamp(g.inner / (g.norm_w * g.norm_l), -1.0, 1.0);
  }
  return g;
}

std::span<const double> triplet_weights(const Triplet& t, bool winner_side,
                                        bool use_weights) {
  if (!use_weights) return {};
  const auto& w = winner_side ? t.winner_weights : t.loser_weights;
  return {w.data(), w.size()};
}

}  // namespace polab
