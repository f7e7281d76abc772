#pragma once

/**
 * Tabular autoregressive softmax policies.
 *
 * A policy is a logit table over (prompt, position, token); each (prompt,
 * position) slice is an independent categorical, so sequence log-probs and
 * their parameter gradients (scores) are closed-form and sparse: a response
 * touches only its own prompt's rows up to its length, and within a touched
 * row the score is w_t * (one_hot(y_t) - softmax(row)).
 */

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace polab {

struct TabularPolicy {
  int prompts = 0;    // P
  int positions = 0;  // T
  int vocab = 0;      // V
  std::vector<double> logits;  // row-major (prompt, position, token)

  TabularPolicy() = default;
  TabularPolicy(int p, int t, int v)
      : prompts(p), positions(t), vocab(v),
        logits(static_cast<std::size_t>(p) * t * v, 0.0) {}

  std::span<const double> row(int prompt, int pos) const {
    const std::size_t off =
        (static_cast<std::size_t>(prompt) * positions + pos) * vocab;
    return {logits.data() + off, static_cast<std::size_t>(vocab)};
  }
  std::span<double> row(int prompt, int pos) {
    const std::size_t off =
        (static_cast<std::size_t>(prompt) * positions + pos) * vocab;
    return {logits.data() + off, static_cast<std::size_t>(vocab)};
  }

  // Throws DomainError on non-finite entries or empty dims.
  void check_valid() const;
};

struct Triplet {
  int prompt = 0;
  std::vector<int> winner;
  std::vector<int> loser;
  // Empty means unit weights. When present, sizes must match the sequences.
  std::vector<double> winner_weights;
  std::vector<double> loser_weights;
};

// Gradient of one response's (weighted) sequence log-prob with respect to
// the logit table. Dense over the vocab axis within occupied rows, zero
// everywhere else.
struct ScoreVec {
  int prompt = -1;
  int vocab = 0;
  std::vector<double> rows;  // length() * vocab

  int length() const {
    return vocab > 0 ? static_cast<int>(rows.size()) / vocab : 0;
  }
  std::span<const double> row(int pos) const {
    return {rows.data() + static_cast<std::size_t>(pos) * vocab,
            static_cast<std::size_t>(vocab)};
  }
  // Entry at an arbitrary table coordinate; zero outside the occupied block.
  double entry(int p, int pos, int token) const {
    if (p != prompt || pos < 0 || pos >= length() || token < 0 || token >= vocab)
      return 0.0;
    return rows[static_cast<std::size_t>(pos) * vocab + token];
  }
};

struct ScoreGeometry {
  double norm_w = 0.0;
  double norm_l = 0.0;
  double inner = 0.0;
  double rho = 0.0;    // meaningful only when defined
  bool defined = false;  // both norms > 0
};

// Restrict geometry to positions in [lo, hi); mirrors output-layer-only
// gradient-norm approximations. The parameter update itself is never masked.
struct PositionMask {
  int lo = 0;
  int hi = 0;
};

// Weighted sequence log-prob: sum_t w_t (logit[x,t,y_t] - logsumexp_v logit[x,t,v]).
// Empty weights mean w_t = 1. Throws DomainError on out-of-range tokens,
// length > T, empty y, or weight-length mismatch.
double log_prob(const TabularPolicy& policy, int prompt, std::span<const int> y,
                std::span<const double> weights = {});

ScoreVec score(const TabularPolicy& policy, int prompt, std::span<const int> y,
               std::span<const double> weights = {});

// Norms, inner product, and cosine over the union of occupied entries.
// Zero norms are reported through the defined flag, never as NaN.
ScoreGeometry score_geometry(const ScoreVec& s_w, const ScoreVec& s_l,
                             const PositionMask* mask = nullptr);

// Convenience: winner/loser weights of a triplet, honoring use_weights.
std::span<const double> triplet_weights(const Triplet& t, bool winner_side,
                                        bool use_weights);

}  // namespace polab
