#include "polab/trajectory_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "polab/errors.hpp"

namespace polab {
namespace {

constexpr const char* kHeader =
    "step,triplet_id,z_w,z_l,z_w_ref,z_l_ref,margin,loss,d_w,d_l,d_w_rc,d_l_rc,"
    "norm_w,norm_l,inner,rho,band_lo,band_hi,log_r,log_r_star,slack,regime,"
    "alpha,flags";

std::string opt_field(const std::optional<double>& v) {
  if (!v.has_value() || !std::isfinite(*v)) return {};
  return format_double(*v);
}

std::string flags_field(const StepFlags& f) {
  std::string s;
  const auto add = [&s](const char* name) {
    if (!s.empty()) s += '|';
    s += name;
  };
  if (f.clipped) add("clipped");
  if (f.passthrough) add("passthrough");
  if (f.domain_clamped) add("domain_clamped");
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open trajectory csv for writing: " + path);
  f << "# " << kTrajectorySchema << "\n" << kHeader << "\n";
  for (const auto& p : traj.points) {
    f << p.step << ',' << p.triplet_id << ',' << format_double(p.z_w) << ','
      << format_double(p.z_l) << ',' << format_double(p.z_w_ref) << ','
      << format_double(p.z_l_ref) << ',' << format_double(p.margin) << ','
      << format_double(p.loss) << ',' << format_double(p.d_w) << ','
      << format_double(p.d_l) << ',' << format_double(p.d_w_rc) << ','
      << format_double(p.d_l_rc) << ',' << format_double(p.norm_w) << ','
      << format_double(p.norm_l) << ',' << format_double(p.inner) << ','
      << opt_field(p.rho) << ',' << opt_field(p.band_lo) << ','
      << opt_field(p.band_hi) << ',' << opt_field(p.log_r) << ','
      << opt_field(p.log_r_star) << ',' << opt_field(p.slack) << ','
      << regime_name(p.regime) << ',' << format_double(p.alpha) << ','
      << flags_field(p.flags) << '\n';
  }
}

std::vector<TrajectoryPoint> read_trajectory_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open trajectory csv: " + path);
  std::string line;
  if (!std::getline(f, line) || line != std::string("# ") + kTrajectorySchema)
    throw DomainError(path + ": not a " + kTrajectorySchema + " file");
  if (!std::getline(f, line) || line != kHeader)
    throw DomainError(path + ": unexpected column header");

  std::vector<TrajectoryPoint> points;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 24) throw DomainError(path + ": malformed row: " + line);
    TrajectoryPoint p;
    p.step = std::stoll(c[0]);
    p.triplet_id = std::stoi(c[1]);
    p.z_w = std::stod(c[2]);
    p.z_l = std::stod(c[3]);
    p.z_w_ref = std::stod(c[4]);
    p.z_l_ref = std::stod(c[5]);
    p.margin = std::stod(c[6]);
    p.loss = std::stod(c[7]);
    p.d_w = std::stod(c[8]);
    p.d_l = std::stod(c[9]);
    p.d_w_rc = std::stod(c[10]);
    p.d_l_rc = std::stod(c[11]);
    p.norm_w = std::stod(c[12]);
    p.norm_l = std::stod(c[13]);
    p.inner = std::stod(c[14]);
    p.rho = parse_opt(c[15]);
    p.band_lo = parse_opt(c[16]);
    p.band_hi = parse_opt(c[17]);
    p.log_r = parse_opt(c[18]);
    p.log_r_star = parse_opt(c[19]);
    p.slack = parse_opt(c[20]);
    // Unbounded band: slack was serialized empty but the ratio is feasible
    // for any positive incentives.
    if (!p.slack && p.log_r && !p.band_lo)
      p.slack = std::numeric_limits<double>::infinity();
    const auto regime = regime_from_name(c[21]);
    if (!regime) throw DomainError(path + ": unknown regime `" + c[21] + "`");
    p.regime = *regime;
    p.alpha = std::stod(c[22]);
    p.flags.clipped = c[23].find("clipped") != std::string::npos;
    p.flags.passthrough = c[23].find("passthrough") != std::string::npos;
    p.flags.domain_clamped = c[23].find("domain_clamped") != std::string::npos;
    p.margin_ref_adjusted = p.margin - (p.z_w_ref - p.z_l_ref);
    points.push_back(p);
  }
  return points;
}

FinalMeans final_corpus_means(const Trajectory& traj) {
  FinalMeans means;
  if (!traj.final_policy) return means;
  const Corpus corpus = generate(traj.config.corpus);
  const bool weighted = uses_token_weights(traj.config.objective);
  double zw = 0.0, zl = 0.0;
  for (const auto& t : corpus.triplets) {
    zw += log_prob(*traj.final_policy, t.prompt, t.winner,
                   triplet_weights(t, true, weighted));
    zl += log_prob(*traj.final_policy, t.prompt, t.loser,
                   triplet_weights(t, false, weighted));
  }
  const double n = static_cast<double>(corpus.triplets.size());
  means.z_w = zw / n;
  means.z_l = zl / n;
  means.margin = means.z_w - means.z_l;
  return means;
}

void write_summary_json(const Trajectory& traj, const PathwaySummary& summary,
                        const std::string& path) {
  nlohmann::json j;
  j["schema"] = "polab.summary.v1";
  const RunConfig& c = traj.config;
  j["fingerprint"] = {
      {"objective", objective_describe(c.objective)},
      {"eta", c.eta},
      {"steps", c.steps},
      {"burn_in", c.effective_burn_in()},
      {"seed", c.seed},
      {"corpus",
       {{"prompts", c.corpus.prompts},
        {"positions", c.corpus.positions},
        {"vocab", c.corpus.vocab},
        {"triplets", c.corpus.n_triplets},
        {"overlap", c.corpus.overlap},
        {"weight_mode",
         c.corpus.weight_mode == WeightMode::Unit ? "unit" : "random_positive"},
        {"seed", c.corpus.seed},
        {"init_scale", c.corpus.init_scale}}},
      {"rc",
       {{"enabled", c.rc.enabled},
        {"momentum", c.rc.momentum},
        {"eps", c.rc.eps},
        {"clip", c.rc.clip_enabled},
        {"alpha_cap", c.rc.alpha_cap},
        {"clip_center",
         c.rc.clip_center_instantaneous ? "instantaneous" : "ema"}}},
      {"ddro_clamp", c.ddro_clamp},
  };
  j["band_approximate"] = c.mask.has_value();
  if (c.mask)
    j["mask"] = {{"lo", c.mask->lo}, {"hi", c.mask->hi}};
  j["pathway_summary"] = {
      {"fraction_both_decrease", summary.fraction_both_decrease},
      {"fraction_disentangled", summary.fraction_disentangled},
      {"fraction_both_increase", summary.fraction_both_increase},
      {"fraction_degenerate", summary.fraction_degenerate},
      {"in_band_fraction", summary.in_band_fraction},
      {"burn_in", summary.burn_in},
  };
  const FinalMeans means = final_corpus_means(traj);
  j["final"] = {
      {"mean_z_w", means.z_w}, {"mean_z_l", means.z_l}, {"mean_margin", means.margin}};

  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open summary file for writing: " + path);
  f << j.dump(2) << "\n";
}

}  // namespace polab
