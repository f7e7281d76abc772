#include "polab/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polab/errors.hpp"
#include "polab/rng.hpp"

namespace polab {
namespace {

std::vector<double> gen_weights(Rng& rng, int len, WeightMode mode) {
  if (mode == WeightMode::Unit) return {};
  std::vector<double> w(static_cast<std::size_t>(len));
  for (auto& x : w) x = rng.uniform(0.1, 2.0);
  return w;
}

}  // namespace

Corpus generate(const CorpusSpec& spec) {
  if (spec.prompts <= 0 || spec.positions <= 0 || spec.n_triplets <= 0)
    throw DomainError("corpus dims must be positive");
  if (spec.vocab < 2)
    throw DomainError("vocab must be >= 2 so winner and loser can differ");
  if (!(spec.overlap >= 0.0 && spec.overlap <= 1.0))
    throw DomainError("overlap must lie in [0, 1]");
  const int shared = static_cast<int>(std::lround(spec.overlap * spec.positions));
  if (shared >= spec.positions)
    throw DomainError("overlap " + std::to_string(spec.overlap) +
                      " leaves no position where winner and loser differ");

  Rng rng(spec.seed);
  Corpus corpus;
  corpus.spec = spec;

  corpus.policy = TabularPolicy(spec.prompts, spec.positions, spec.vocab);
  for (auto& v : corpus.policy.logits) v = spec.init_scale * rng.normal();
  corpus.reference = corpus.policy;

  corpus.triplets.reserve(static_cast<std::size_t>(spec.n_triplets));
  std::vector<int> order(static_cast<std::size_t>(spec.positions));
  for (int i = 0; i < spec.positions; ++i) order[static_cast<std::size_t>(i)] = i;

  for (int i = 0; i < spec.n_triplets; ++i) {
    Triplet t;
    t.prompt = i % spec.prompts;
    t.winner.resize(static_cast<std::size_t>(spec.positions));
    t.loser.resize(static_cast<std::size_t>(spec.positions));
    rng.shuffle(order);
    for (int k = 0; k < spec.positions; ++k) {
      const auto pos = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
      const int w_tok = rng.uniform_int(spec.vocab);
      t.winner[pos] = w_tok;
      if (k < shared) {
        t.loser[pos] = w_tok;
      } else {
        int l = rng.uniform_int(spec.vocab);
        while (l == w_tok) l = rng.uniform_int(spec.vocab);
        t.loser[pos] = l;
      }
    }
    t.winner_weights = gen_weights(rng, spec.positions, spec.weight_mode);
    t.loser_weights = gen_weights(rng, spec.positions, spec.weight_mode);
    corpus.triplets.push_back(std::move(t));
  }
  return corpus;
}

std::vector<RhoEntry> rho_profile(const Corpus& corpus, const TabularPolicy& policy) {
  std::vector<RhoEntry> out;
  out.reserve(corpus.triplets.size());
  for (const auto& t : corpus.triplets) {
    const ScoreVec s_w = score(policy, t.prompt, t.winner);
    const ScoreVec s_l = score(policy, t.prompt, t.loser);
    const ScoreGeometry g = score_geometry(s_w, s_l);
    out.push_back({g.defined ? g.rho : 0.0, g.defined});
  }
  return out;
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
  out << "# polab.corpus.v1 prompts=" << corpus.spec.prompts
      << " positions=" << corpus.spec.positions << " vocab=" << corpus.spec.vocab
      << "\n";
  for (const auto& t : corpus.triplets) {
    out << t.prompt;
    const auto write_tokens = [&](const std::vector<int>& ys) {
      out << '\t';
      for (std::size_t i = 0; i < ys.size(); ++i) out << (i ? "," : "") << ys[i];
    };
    const auto write_weights = [&](const std::vector<double>& ws) {
      out << '\t';
      if (ws.empty()) {
        out << '-';
        return;
      }
      char buf[32];
      for (std::size_t i = 0; i < ws.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17e", ws[i]);
        out << (i ? "," : "") << buf;
      }
    };
    write_tokens(t.winner);
    write_tokens(t.loser);
    write_weights(t.winner_weights);
    write_weights(t.loser_weights);
    out << '\n';
  }
}

void save_corpus_file(const Corpus& corpus, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open corpus file for writing: " + path);
  save_corpus(corpus, f);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

LoadedCorpus load_corpus(std::istream& in) {
  LoadedCorpus lc;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# polab.corpus.v1", 0) != 0)
    throw DomainError("not a polab corpus file (missing header)");
  std::istringstream hdr(line.substr(std::string("# polab.corpus.v1").size()));
  std::string field;
  while (hdr >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq);
    const int value = std::stoi(field.substr(eq + 1));
    if (key == "prompts") lc.prompts = value;
    if (key == "positions") lc.positions = value;
    if (key == "vocab") lc.vocab = value;
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 5) throw DomainError("malformed corpus record: " + line);
    Triplet t;
    t.prompt = std::stoi(cols[0]);
    for (const auto& s : split(cols[1], ',')) t.winner.push_back(std::stoi(s));
    for (const auto& s : split(cols[2], ',')) t.loser.push_back(std::stoi(s));
    if (cols[3] != "-")
      for (const auto& s : split(cols[3], ',')) t.winner_weights.push_back(std::stod(s));
    if (cols[4] != "-")
      for (const auto& s : split(cols[4], ',')) t.loser_weights.push_back(std::stod(s));
    lc.triplets.push_back(std::move(t));
  }
  return lc;
}

LoadedCorpus load_corpus_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open corpus file: " + path);
  return load_corpus(f);
}

}  // namespace polab
