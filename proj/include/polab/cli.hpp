#pragma once

/**
 * Command implementations behind the `polab` binary: run, sweep, verify,
 * report. Kept in the library so tests can drive them without spawning
 * processes.
 *
 * Exit codes: 0 success, 1 config error, 2 runtime abort (non-finite
 * diagnostics), 3 verification failure.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "polab/config.hpp"
#include "polab/verify.hpp"

namespace polab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitVerify = 3;

struct CliPaths {
  std::string out_dir;  // empty: use paths as given / cwd
};

int cmd_run(const std::string& config_path, const CliPaths& paths,
            std::optional<std::uint64_t> seed_override, std::ostream& out,
            std::ostream& err);

int cmd_sweep(const std::string& sweep_path, const CliPaths& paths, int parallel,
              std::optional<std::uint64_t> seed_override, std::ostream& out,
              std::ostream& err);

int cmd_verify(const CliPaths& paths, FaultInjection fault, std::ostream& out,
               std::ostream& err);

int cmd_report(const std::string& csv_path, std::int64_t burn_in, std::ostream& out,
               std::ostream& err);

// Shared helpers (used by tests as well).
std::string join_path(const std::string& dir, const std::string& leaf);
int run_config_to_files(const RunConfig& config, const std::string& csv_path,
                        const std::string& summary_path, bool charts,
                        std::ostream& err);

}  // namespace polab
