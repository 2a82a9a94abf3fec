// Seeded Monte Carlo campaigns and their outputs.
//
// Seeds: run ℓ uses r = derive_seed(master, ℓ). Under r, substream 0 drives
// the truth, 1 the measurement noise, 2 the prior mean, and 16 + kind each
// tracker, so results do not depend on thread count or tracker order.
#pragma once

#include "nftrack/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nftrack {

struct TrackerStep {
  State estimate = State::Zero();
  /// |p̂ - p| in metres; +inf once the tracker has failed in this run.
  double error = 0.0;
  bool weight_reset = false;
  bool mle_failed = false;
  bool regularized = false;
};

struct RunRecord {
  int run = 0;
  std::vector<State> truth;
  /// tracks[t][k] for tracker t of the scenario and step k (0-based).
  std::vector<std::vector<TrackerStep>> tracks;
  /// Empty when tracker t completed; otherwise the failure message.
  std::vector<std::string> failures;
  std::vector<double> tracker_seconds;
  /// Set when the run could not be simulated at all.
  std::string error;
};

struct Campaign {
  Scenario scenario;
  std::vector<RunRecord> runs;
  double wall_seconds = 0.0;
};

RunRecord run_single(const Scenario& scenario, int run);

/// All runs of the scenario; threads <= 0 uses every hardware thread.
Campaign run_campaign(const Scenario& scenario, int threads = 1);

/// Position errors of tracker t over every (run, step), run-major.
std::vector<double> tracker_errors(const Campaign& campaign, std::size_t tracker);

/// Fraction of errors at or below each threshold.
std::vector<double> empirical_cdf(const std::vector<double>& errors,
                                  const std::vector<double>& thresholds);
std::vector<double> empirical_cdf(const Campaign& campaign, std::size_t tracker,
                                  const std::vector<double>& thresholds);

/// count evenly spaced thresholds from 0 to max_m inclusive.
std::vector<double> cdf_thresholds(double max_m, int count);

struct StepStatistics {
  /// sqrt(mean over runs of e²) per step.
  std::vector<double> rmse;
  /// Delta-method standard error of rmse.
  std::vector<double> rmse_se;
};
StepStatistics step_statistics(const Campaign& campaign, std::size_t tracker);

struct TrackerSummary {
  std::string name;
  double median_error = 0.0;
  double rmse = 0.0;
  int weight_resets = 0;
  int mle_failures = 0;
  int regularizations = 0;
  int failed_runs = 0;
  double seconds = 0.0;
  /// weight_resets / (runs * steps)
  double reset_rate = 0.0;
};
TrackerSummary summarize(const Campaign& campaign, std::size_t tracker);

inline constexpr int kCsvSchemaVersion = 1;

std::string runs_csv(const Campaign& campaign);
std::string cdf_csv(const Campaign& campaign, const std::vector<double>& thresholds);
std::string summary_json(const Campaign& campaign);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// runs.csv, cdf.csv and summary.json under out_dir (created if needed).
void write_campaign(const Campaign& campaign, const std::filesystem::path& out_dir,
                    const std::vector<double>& thresholds);

}  // namespace nftrack
