#include "polab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "polab/errors.hpp"

namespace polab {
namespace {

struct KeyValue {
  std::string value;
  int line = 0;
  bool consumed = false;
};

using KvMap = std::map<std::string, KeyValue>;

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

KvMap tokenize(const std::string& text, const std::string& name) {
  KvMap kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) fail(name, lineno, "expected `key = value`");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) fail(name, lineno, "empty key");
    if (kv.count(key)) fail(name, lineno, "duplicate key `" + key + "`");
    kv[key] = {value, lineno, false};
  }
  return kv;
}

class Reader {
 public:
  Reader(KvMap kv, std::string name) : kv_(std::move(kv)), name_(std::move(name)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string raw(const std::string& key) {
    auto it = kv_.find(key);
    it->second.consumed = true;
    return it->second.value;
  }

  std::string get_string(const std::string& key, const std::string& def) {
    return has(key) ? raw(key) : def;
  }

  double get_double(const std::string& key, double def) {
    if (!has(key)) return def;
    const int line = kv_[key].line;
    const std::string v = raw(key);
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      fail(name_, line, "expected a number for `" + key + "`, got `" + v + "`");
    }
  }

  std::int64_t get_int(const std::string& key, std::int64_t def) {
    if (!has(key)) return def;
    const int line = kv_[key].line;
    const std::string v = raw(key);
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      fail(name_, line, "expected an integer for `" + key + "`, got `" + v + "`");
    }
  }

  bool get_bool(const std::string& key, bool def) {
    if (!has(key)) return def;
    const int line = kv_[key].line;
    const std::string v = raw(key);
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    fail(name_, line, "expected a boolean for `" + key + "`, got `" + v + "`");
  }

  void reject_unconsumed() const {
    for (const auto& [key, kv] : kv_)
      if (!kv.consumed) fail(name_, kv.line, "unknown key `" + key + "`");
  }

  const std::string& name() const { return name_; }
  int line_of(const std::string& key) { return kv_[key].line; }

 private:
  KvMap kv_;
  std::string name_;
};

ObjectiveParams read_objective_params(Reader& r) {
  ObjectiveParams p;
  p.beta = r.get_double("objective.beta", p.beta);
  p.lambda = r.get_double("objective.lambda", p.lambda);
  p.gamma = r.get_double("objective.gamma", p.gamma);
  p.alpha = r.get_double("objective.alpha", p.alpha);
  p.lambda_w = r.get_double("objective.lambda_w", p.lambda_w);
  p.lambda_l = r.get_double("objective.lambda_l", p.lambda_l);
  return p;
}

RunConfig read_run_config(Reader& r) {
  RunConfig c;
  c.corpus.prompts = static_cast<int>(r.get_int("corpus.prompts", c.corpus.prompts));
  c.corpus.positions =
      static_cast<int>(r.get_int("corpus.positions", c.corpus.positions));
  c.corpus.vocab = static_cast<int>(r.get_int("corpus.vocab", c.corpus.vocab));
  c.corpus.n_triplets =
      static_cast<int>(r.get_int("corpus.triplets", c.corpus.n_triplets));
  c.corpus.overlap = r.get_double("corpus.overlap", c.corpus.overlap);
  c.corpus.seed = static_cast<std::uint64_t>(
      r.get_int("corpus.seed", static_cast<std::int64_t>(c.corpus.seed)));
  c.corpus.init_scale = r.get_double("corpus.init_scale", c.corpus.init_scale);
  const std::string wm = r.get_string("corpus.weight_mode", "unit");
  if (wm == "unit") {
    c.corpus.weight_mode = WeightMode::Unit;
  } else if (wm == "random_positive") {
    c.corpus.weight_mode = WeightMode::RandomPositive;
  } else {
    throw ConfigError(r.name() + ": unknown corpus.weight_mode `" + wm + "`");
  }

  const std::string kind = r.get_string("objective.kind", "dpo");
  const ObjectiveParams params = read_objective_params(r);
  c.objective = make_objective(kind, params);

  c.rc.enabled = r.get_bool("rc.enabled", c.rc.enabled);
  c.rc.momentum = r.get_double("rc.momentum", c.rc.momentum);
  c.rc.eps = r.get_double("rc.eps", c.rc.eps);
  c.rc.clip_enabled = r.get_bool("rc.clip", c.rc.clip_enabled);
  c.rc.alpha_cap = r.get_double("rc.alpha_cap", c.rc.alpha_cap);
  const std::string center = r.get_string("rc.clip_center", "ema");
  if (center == "ema") {
    c.rc.clip_center_instantaneous = false;
  } else if (center == "instantaneous") {
    c.rc.clip_center_instantaneous = true;
  } else {
    throw ConfigError(r.name() + ": rc.clip_center must be `ema` or `instantaneous`");
  }

  c.eta = r.get_double("run.eta", c.eta);
  c.steps = r.get_int("run.steps", c.steps);
  c.burn_in = r.get_int("run.burn_in", c.burn_in);
  c.seed = static_cast<std::uint64_t>(
      r.get_int("run.seed", static_cast<std::int64_t>(c.seed)));
  c.ddro_clamp = r.get_bool("run.ddro_clamp", c.ddro_clamp);

  c.outputs.csv_path = r.get_string("output.csv", "");
  c.outputs.summary_path = r.get_string("output.summary", "");
  c.outputs.charts = r.get_bool("output.charts", false);

  if (r.has("mask.lo") || r.has("mask.hi")) {
    PositionMask m;
    m.lo = static_cast<int>(r.get_int("mask.lo", 0));
    m.hi = static_cast<int>(r.get_int("mask.hi", c.corpus.positions));
    c.mask = m;
  }
  return c;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      cur.push_back(ch);
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!(eta > 0.0)) throw ConfigError("run.eta must be positive");
  if (steps < 0) throw ConfigError("run.steps must be nonnegative");
  if (burn_in >= 0 && steps > 0 && burn_in >= steps)
    throw ConfigError("run.burn_in must be smaller than run.steps");
  if (!(rc.momentum >= 0.0 && rc.momentum < 1.0))
    throw ConfigError("rc.momentum must lie in [0, 1)");
  if (!(rc.eps > 0.0)) throw ConfigError("rc.eps must be positive");
  if (!(rc.alpha_cap > 0.0)) throw ConfigError("rc.alpha_cap must be positive");
  if (mask && !(mask->lo >= 0 && mask->lo < mask->hi && mask->hi <= corpus.positions))
    throw ConfigError("mask range must satisfy 0 <= lo < hi <= corpus.positions");
  try {
    polab::validate(objective);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

ObjectiveSpec make_objective(const std::string& kind, const ObjectiveParams& p) {
  const auto pick = [](double override_v, double def) {
    return std::isnan(override_v) ? def : override_v;
  };
  if (kind == "dpo") return Dpo{pick(p.beta, Dpo{}.beta)};
  if (kind == "ti_dpo") return TiDpo{pick(p.beta, TiDpo{}.beta)};
  if (kind == "ipo") return Ipo{pick(p.lambda, Ipo{}.lambda)};
  if (kind == "r_dpo")
    return RDpo{pick(p.beta, RDpo{}.beta), pick(p.alpha, RDpo{}.alpha)};
  if (kind == "simpo")
    return SimPo{pick(p.beta, SimPo{}.beta), pick(p.gamma, SimPo{}.gamma)};
  if (kind == "cpo") return Cpo{pick(p.beta, Cpo{}.beta), pick(p.lambda, Cpo{}.lambda)};
  if (kind == "rrhf") return Rrhf{pick(p.lambda, Rrhf{}.lambda)};
  if (kind == "slic_hf")
    return SlicHf{pick(p.gamma, SlicHf{}.gamma), pick(p.lambda, SlicHf{}.lambda)};
  if (kind == "kto")
    return Kto{pick(p.lambda_w, Kto{}.lambda_w), pick(p.lambda_l, Kto{}.lambda_l)};
  if (kind == "ddro") return Ddro{};
  if (kind == "dil_bce") return DilBce{};
  if (kind == "dil_ukl") return DilUkl{};
  if (kind == "dil_lsif") return DilLsif{};
  throw ConfigError("unknown objective kind `" + kind + "`");
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  Reader r(tokenize(text, name), name);
  RunConfig c = read_run_config(r);
  r.reject_unconsumed();
  c.validate();
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

SweepConfig parse_sweep_text(const std::string& text, const std::string& name) {
  Reader r(tokenize(text, name), name);
  SweepConfig s;
  const std::string objectives = r.get_string("sweep.objectives", "dpo");
  s.objectives = split_list(objectives);
  for (const std::string& rc : split_list(r.get_string("sweep.rc", "off,on"))) {
    if (rc == "on" || rc == "true") {
      s.rc_values.push_back(true);
    } else if (rc == "off" || rc == "false") {
      s.rc_values.push_back(false);
    } else {
      throw ConfigError(name + ": sweep.rc entries must be on/off");
    }
  }
  for (const std::string& seed : split_list(r.get_string("sweep.seeds", "0"))) {
    try {
      s.seeds.push_back(static_cast<std::uint64_t>(std::stoull(seed)));
    } catch (const std::exception&) {
      throw ConfigError(name + ": bad seed `" + seed + "`");
    }
  }
  s.base = read_run_config(r);
  // The same objective.* overrides apply to every kind on the grid.
  s.params = read_objective_params(r);
  r.reject_unconsumed();
  if (s.objectives.empty() || s.rc_values.empty() || s.seeds.empty())
    throw ConfigError(name + ": sweep grid has an empty axis");
  // Validate every kind up front so failures surface before any cell runs.
  for (const auto& kind : s.objectives) (void)make_objective(kind, s.params);
  return s;
}

SweepConfig parse_sweep_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open sweep file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_sweep_text(ss.str(), path);
}

}  // namespace polab
