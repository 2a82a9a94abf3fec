// Command-line subcommands. Each command writes its files atomically into
// the output directory.
#pragma once

#include "nftrack/config.hpp"
#include "nftrack/pcrlb.hpp"

#include <filesystem>
#include <string>

namespace nftrack {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailure = 1;
inline constexpr int kExitConfigError = 2;

/// One row per (sweep point, antenna).
std::string phase_profile_csv(const Config& config);
/// Closed-form polar FIM along the broadside axis for every configured array.
std::string fim_sweep_csv(const Config& config);
std::string bound_csv(const PcrlbTrace& trace);

/// Return the path of the file written.
std::filesystem::path cmd_phase_profile(const Config& config, const std::filesystem::path& out_dir);
std::filesystem::path cmd_fim_sweep(const Config& config, const std::filesystem::path& out_dir);
std::filesystem::path cmd_bound(const Config& config, const std::filesystem::path& out_dir);
/// Writes runs.csv, cdf.csv and summary.json.
void cmd_track(const Config& config, const std::filesystem::path& out_dir, int threads);

/// Full command line: `nftrack <subcommand> --config <path> [--seed N]
/// [--out-dir DIR] [--threads N]`. Returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace nftrack
