#pragma once

/**
 * Synthetic preference corpora. The overlap knob sets the exact number of
 * positions where winner and loser share a token, which is what governs the
 * achievable score cosine rho: shared positions push it up, disjoint
 * positions at shared prompts push it down.
 */

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polab/policy.hpp"

namespace polab {

enum class WeightMode { Unit, RandomPositive };

struct CorpusSpec {
  int prompts = 2;        // P
  int positions = 8;      // T
  int vocab = 12;         // V
  int n_triplets = 16;
  double overlap = 0.5;   // fraction of positions sharing a token
  WeightMode weight_mode = WeightMode::Unit;
  std::uint64_t seed = 0;
  double init_scale = 0.5;  // stddev of the i.i.d. logit init
};

struct Corpus {
  CorpusSpec spec;
  std::vector<Triplet> triplets;
  TabularPolicy policy;     // trainable, freshly initialized
  TabularPolicy reference;  // deep copy of the initial policy
};

// Deterministic given spec.seed. Every triplet gets exactly
// round(overlap * T) shared positions; the rest differ. Throws DomainError
// when V < 2 or when the requested overlap forces y_w == y_l.
Corpus generate(const CorpusSpec& spec);

struct RhoEntry {
  double rho = 0.0;
  bool defined = false;
};

// Per-triplet score cosine at the given parameters.
std::vector<RhoEntry> rho_profile(const Corpus& corpus, const TabularPolicy& policy);

// Line-delimited triplet records (prompt, tokens, weights) for cross-run reuse.
void save_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus_file(const Corpus& corpus, const std::string& path);

struct LoadedCorpus {
  int prompts = 0;
  int positions = 0;
  int vocab = 0;
  std::vector<Triplet> triplets;
};
LoadedCorpus load_corpus(std::istream& in);
LoadedCorpus load_corpus_file(const std::string& path);

}  // namespace polab
