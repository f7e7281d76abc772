// polab: a desk-scale laboratory for preference-optimization dynamics.
// Subcommands: run, sweep, verify, report.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "polab/cli.hpp"
#include "polab/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"preference-optimization dynamics laboratory"};
  app.require_subcommand(1);
  // Let --out/--simd appear after the subcommand too.
  app.fallthrough();

  std::string out_dir;
  std::string simd = "auto";
  app.add_option("--out", out_dir, "output directory (created if missing)");
  app.add_option("--simd", simd, "kernel backend: auto|scalar|avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  std::string run_config;
  std::int64_t seed_override = -1;
  auto* run = app.add_subcommand("run", "execute one training run from a config");
  run->add_option("--config", run_config, "config file")->required();
  run->add_option("--seed-override", seed_override,
                  "override run and corpus seeds");

  std::string sweep_config;
  int parallel = 0;
  auto* sweep = app.add_subcommand(
      "sweep", "cross-product of objectives x rc x seeds from a grid spec");
  sweep->add_option("--config", sweep_config, "sweep grid file")->required();
  sweep->add_option("--parallel", parallel, "worker threads (default: hardware)");
  sweep->add_option("--seed-override", seed_override, "replace the seed axis");

  std::string fault = "none";
  auto* verify = app.add_subcommand("verify", "run the oracle gate suite");
  verify
      ->add_option("--inject-fault", fault,
                   "test hook: none|incentive-sign (forces one gate red)")
      ->check(CLI::IsMember({"none", "incentive-sign"}));

  std::string report_csv;
  std::int64_t burn_in = -1;
  auto* report =
      app.add_subcommand("report", "re-derive the pathway summary from a CSV");
  report->add_option("--csv", report_csv, "trajectory CSV")->required();
  report->add_option("--burn-in", burn_in, "burn-in steps (default: 10%)");

  CLI11_PARSE(app, argc, argv);

  if (simd == "scalar") {
    polab::kernels::force_backend(polab::kernels::Backend::Scalar);
  } else if (simd == "avx2") {
    if (!polab::kernels::avx2_supported()) {
      std::cerr << "avx2 backend not available on this machine\n";
      return polab::kExitConfig;
    }
    polab::kernels::force_backend(polab::kernels::Backend::Avx2);
  }

  const polab::CliPaths paths{out_dir};
  const std::optional<std::uint64_t> seed =
      seed_override >= 0 ? std::optional<std::uint64_t>(
                               static_cast<std::uint64_t>(seed_override))
                         : std::nullopt;

  if (run->parsed())
    return polab::cmd_run(run_config, paths, seed, std::cout, std::cerr);
  if (sweep->parsed())
    return polab::cmd_sweep(sweep_config, paths, parallel, seed, std::cout,
                            std::cerr);
  if (verify->parsed())
    return polab::cmd_verify(paths,
                             fault == "incentive-sign"
                                 ? polab::FaultInjection::IncentiveSign
                                 : polab::FaultInjection::None,
                             std::cout, std::cerr);
  if (report->parsed())
    return polab::cmd_report(report_csv, burn_in, std::cout, std::cerr);
  return polab::kExitConfig;
}
