#include "polab/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "polab/charts.hpp"
#include "polab/dynamics.hpp"
#include "polab/errors.hpp"
#include "polab/kernels.hpp"
#include "polab/trajectory_io.hpp"

namespace polab {
namespace {

namespace fs = std::filesystem;

std::string default_if_empty(const std::string& value, const std::string& def) {
  return value.empty() ? def : value;
}

}  // namespace

std::string join_path(const std::string& dir, const std::string& leaf) {
  if (dir.empty()) return leaf;
  if (fs::path(leaf).is_absolute()) return leaf;
  return (fs::path(dir) / leaf).string();
}

int run_config_to_files(const RunConfig& config, const std::string& csv_path,
                        const std::string& summary_path, bool charts,
                        std::ostream& err) {
  try {
    const Trajectory traj = run_trajectory(config);
    write_trajectory_csv(traj, csv_path);
    PathwaySummary summary{};
    if (!traj.points.empty())
      summary = pathway_summary(traj, config.effective_burn_in());
    write_summary_json(traj, summary, summary_path);
    if (charts) {
      const std::string stem = csv_path.size() > 4 && csv_path.ends_with(".csv")
                                   ? csv_path.substr(0, csv_path.size() - 4)
                                   : csv_path;
      write_charts(traj, stem);
    }
    return kExitOk;
  } catch (const NonFiniteError& e) {
    err << "runtime abort: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "runtime abort: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_run(const std::string& config_path, const CliPaths& paths,
            std::optional<std::uint64_t> seed_override, std::ostream& out,
            std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config_file(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seed_override) {
    config.seed = *seed_override;
    config.corpus.seed = *seed_override;
  }
  if (!paths.out_dir.empty()) fs::create_directories(paths.out_dir);
  const std::string csv_path = join_path(
      paths.out_dir, default_if_empty(config.outputs.csv_path, "trajectory.csv"));
  const std::string summary_path = join_path(
      paths.out_dir, default_if_empty(config.outputs.summary_path, "summary.json"));
  const int rc =
      run_config_to_files(config, csv_path, summary_path, config.outputs.charts, err);
  if (rc == kExitOk)
    out << "wrote " << csv_path << " and " << summary_path << "\n";
  return rc;
}

namespace {

struct SweepCell {
  std::string objective;
  bool rc = false;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string status;
  PathwaySummary summary{};
};

}  // namespace

int cmd_sweep(const std::string& sweep_path, const CliPaths& paths, int parallel,
              std::optional<std::uint64_t> seed_override, std::ostream& out,
              std::ostream& err) {
  SweepConfig sweep;
  try {
    sweep = parse_sweep_file(sweep_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seed_override) sweep.seeds = {*seed_override};

  // Deterministic cell order: (objective, rc, seed).
  std::vector<SweepCell> cells;
  for (const auto& kind : sweep.objectives)
    for (bool rc : sweep.rc_values)
      for (std::uint64_t seed : sweep.seeds) {
        SweepCell cell;
        cell.objective = kind;
        cell.rc = rc;
        cell.seed = seed;
        cells.push_back(std::move(cell));
      }

  const std::string out_dir = paths.out_dir.empty() ? "sweep_out" : paths.out_dir;
  fs::create_directories(out_dir);

  std::mutex err_mutex;
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      SweepCell& cell = cells[i];
      RunConfig config = sweep.base;
      try {
        config.objective = make_objective(cell.objective, sweep.params);
        config.rc.enabled = cell.rc;
        config.seed = cell.seed;
        config.corpus.seed = cell.seed;
        config.validate();
        std::ostringstream name;
        name << cell.objective << (cell.rc ? "_rc" : "_base") << "_" << cell.seed;
        const std::string cell_dir = join_path(out_dir, name.str());
        fs::create_directories(cell_dir);

        const Trajectory traj = run_trajectory(config);
        write_trajectory_csv(traj, join_path(cell_dir, "trajectory.csv"));
        PathwaySummary summary{};
        if (!traj.points.empty())
          summary = pathway_summary(traj, config.effective_burn_in());
        write_summary_json(traj, summary, join_path(cell_dir, "summary.json"));
        if (config.outputs.charts)
          write_charts(traj, join_path(cell_dir, "trajectory"));
        cell.summary = summary;
        cell.ok = true;
        cell.status = "ok";
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.status = e.what();
        std::lock_guard<std::mutex> lock(err_mutex);
        err << "cell " << cell.objective << (cell.rc ? "/rc" : "/base") << " seed "
            << cell.seed << " failed: " << e.what() << "\n";
      }
    }
  };

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int n_threads = std::max(1, parallel > 0 ? parallel : hw);
  std::vector<std::thread> threads;
  for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  // Combined comparison table, one row per cell in deterministic order.
  const std::string table_path = join_path(out_dir, "sweep_summary.csv");
  {
    std::ofstream f(table_path, std::ios::binary);
    f << "objective,rc,seed,status,fraction_both_decrease,fraction_disentangled,"
         "fraction_both_increase,fraction_degenerate,in_band_fraction\n";
    for (const auto& c : cells) {
      f << c.objective << ',' << (c.rc ? "on" : "off") << ',' << c.seed << ','
        << (c.ok ? "ok" : "error");
      if (c.ok) {
        f << ',' << format_double(c.summary.fraction_both_decrease) << ','
          << format_double(c.summary.fraction_disentangled) << ','
          << format_double(c.summary.fraction_both_increase) << ','
          << format_double(c.summary.fraction_degenerate) << ','
          << format_double(c.summary.in_band_fraction);
      } else {
        f << ",,,,,";
      }
      f << '\n';
    }
  }
  const std::size_t failures = static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) { return !c.ok; }));
  out << "sweep: " << cells.size() - failures << "/" << cells.size()
      << " cells ok, table at " << table_path << "\n";
  return failures == 0 ? kExitOk : kExitRuntime;
}

int cmd_verify(const CliPaths& paths, FaultInjection fault, std::ostream& out,
               std::ostream& err) {
  (void)err;
  out << "kernel backend: " << kernels::backend_name(kernels::active_backend())
      << "\n";
  const VerifyReport report = run_verification(fault);
  out << std::left << std::setw(36) << "gate" << std::setw(12) << "tolerance"
      << std::setw(14) << "observed"
      << "status\n";
  for (const auto& g : report.gates) {
    std::ostringstream tol, obs;
    tol << std::scientific << std::setprecision(2) << g.tolerance;
    obs << std::scientific << std::setprecision(3) << g.observed;
    out << std::left << std::setw(36) << g.name << std::setw(12) << tol.str()
        << std::setw(14) << obs.str() << (g.pass ? "pass" : "FAIL") << "\n";
  }

  nlohmann::json j;
  j["schema"] = "polab.verify.v1";
  j["all_pass"] = report.all_pass();
  j["gates"] = nlohmann::json::array();
  for (const auto& g : report.gates)
    j["gates"].push_back({{"name", g.name},
                          {"tolerance", g.tolerance},
                          {"observed", g.observed},
                          {"pass", g.pass},
                          {"detail", g.detail}});
  const std::string summary_path =
      join_path(paths.out_dir, "verify_summary.json");
  if (!paths.out_dir.empty()) fs::create_directories(paths.out_dir);
  std::ofstream f(summary_path, std::ios::binary);
  if (f) f << j.dump(2) << "\n";

  out << (report.all_pass() ? "all gates pass" : "verification FAILED") << "\n";
  return report.all_pass() ? kExitOk : kExitVerify;
}

int cmd_report(const std::string& csv_path, std::int64_t burn_in, std::ostream& out,
               std::ostream& err) {
  try {
    const auto points = read_trajectory_csv(csv_path);
    if (points.empty()) {
      err << "trajectory is empty\n";
      return kExitConfig;
    }
    const std::int64_t effective =
        burn_in >= 0 ? burn_in : static_cast<std::int64_t>(points.size()) / 10;
    const PathwaySummary s = pathway_summary_points(points, effective);
    nlohmann::json j = {
        {"schema", "polab.report.v1"},
        {"csv", csv_path},
        {"burn_in", s.burn_in},
        {"fraction_both_decrease", s.fraction_both_decrease},
        {"fraction_disentangled", s.fraction_disentangled},
        {"fraction_both_increase", s.fraction_both_increase},
        {"fraction_degenerate", s.fraction_degenerate},
        {"in_band_fraction", s.in_band_fraction},
    };
    out << j.dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "report error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace polab
