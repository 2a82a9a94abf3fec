#include "nftrack/harness.hpp"

#include "nftrack/ekf.hpp"
#include "nftrack/particle_filter.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "json.hpp"

namespace nftrack {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct RunContext {
  const Scenario& scenario;
  PhaseObservation obs;
  MeasurementModel model;
  MotionModel motion;
  GaussianBelief prior;
  const std::vector<State>& truth;
  const std::vector<PhaseVector>& z;
};

double position_error(const State& estimate, const State& truth) {
  return (position_of(estimate) - position_of(truth)).norm();
}

void track_ekf(const RunContext& ctx, std::vector<TrackerStep>& out) {
  GaussianBelief predicted = ctx.prior;
  for (std::size_t k = 0; k < ctx.z.size(); ++k) {
    const EkfStepResult r = ekf_step(predicted, ctx.z[k], ctx.obs, ctx.motion);
    out[k].estimate = r.posterior.mean;
    out[k].regularized = r.regularized;
    predicted = r.predicted;
  }
}

void track_mle(const RunContext& ctx, Rng& rng, std::vector<TrackerStep>& out) {
  const Scenario& sc = ctx.scenario;
  Vec3 center = position_of(ctx.prior.mean);
  const Vec3 drift = sc.tau * velocity_of(ctx.prior.mean);
  for (std::size_t k = 0; k < ctx.z.size(); ++k) {
    const MleResult r =
        mle(ctx.model, ctx.z[k], SearchBox::centered(center, sc.mle_half_width), sc.mle, rng);
    if (r.failed) {
      out[k].mle_failed = true;
      out[k].estimate = make_state(center, Vec3::Zero());
    } else {
      out[k].estimate = r.estimate;
    }
    center = position_of(out[k].estimate) + drift;
  }
}

void track_pf(const RunContext& ctx, TrackerKind kind, Rng& rng, std::vector<TrackerStep>& out) {
  const Scenario& sc = ctx.scenario;
  IsConfig cfg;
  cfg.kind = kind == TrackerKind::kPfPrior        ? IsKind::kPrior
             : kind == TrackerKind::kPfLikelihood ? IsKind::kLikelihood
                                                  : IsKind::kLinearizedOptimal;
  cfg.spread_covariance = sc.spread();
  cfg.pinv_tolerance = sc.pinv_tolerance;
  cfg.wrap_linopt_residual = sc.wrap_linopt_residual;

  Rng mle_rng = rng.split();
  const MlProvider ml = [&](const Eigen::VectorXd& z,
                            const ParticleSet& previous) -> std::optional<State> {
    // Box around the predicted particle cloud, three standard deviations wide.
    Vec3 mean = Vec3::Zero();
    Vec3 sq = Vec3::Zero();
    for (const State& s : previous.states) {
      const Vec3 p = position_of(ctx.motion.A * s);
      mean += p;
      sq += p.cwiseProduct(p);
    }
    const double m = static_cast<double>(previous.size());
    mean /= m;
    const Vec3 var = (sq / m - mean.cwiseProduct(mean)).cwiseMax(0.0);
    const Vec3 half = (3.0 * var.cwiseSqrt()).cwiseMax(1e-3);
    const MleResult r = mle(ctx.model, z, SearchBox::centered(mean, half), sc.mle, mle_rng);
    if (r.failed) return std::nullopt;
    return r.estimate;
  };

  ParticleSet ps = sample_particles(ctx.prior, sc.particles, rng);
  for (std::size_t k = 0; k < ctx.z.size(); ++k) {
    PfStepResult r;
    if (k == 0) {
      r = pf_update(ps, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ps.size())), ctx.z[k],
                    ctx.obs, rng);
    } else {
      r = pf_step(ps, ctx.z[k], ctx.obs, ctx.motion, cfg, rng, ml);
    }
    out[k].estimate = r.estimate;
    out[k].weight_reset = r.flags.weight_reset;
    out[k].mle_failed = r.flags.mle_failed;
    out[k].regularized = r.flags.rank_deficient;
    ps = std::move(r.particles);
  }
}

}  // namespace

RunRecord run_single(const Scenario& scenario, int run) {
  RunRecord rec;
  rec.run = run;
  const std::size_t n_trackers = scenario.trackers.size();
  const auto steps = static_cast<std::size_t>(scenario.steps);
  rec.tracks.assign(n_trackers, std::vector<TrackerStep>(steps));
  rec.failures.assign(n_trackers, std::string());
  rec.tracker_seconds.assign(n_trackers, 0.0);

  const std::uint64_t run_seed = derive_seed(scenario.seed, static_cast<std::uint64_t>(run));
  try {
    rec.truth = generate_truth(scenario, derive_seed(run_seed, 0));

    const MeasurementModel truth_model = scenario.truth_measurement();
    Rng meas_rng(derive_seed(run_seed, 1));
    std::vector<PhaseVector> z;
    z.reserve(steps);
    for (const State& s : rec.truth) z.push_back(observe_noisy(truth_model, position_of(s), meas_rng));

    // Prior mean drawn around the true initial state, so that s₀ ~ N(m₀, Σ₀).
    Rng prior_rng(derive_seed(run_seed, 2));
    const Mat6 p0 = scenario.prior_cov();
    GaussianBelief prior{sample_gaussian(scenario.initial_state, psd_factor(p0), prior_rng), p0};

    const MeasurementModel model = scenario.tracker_measurement();
    const RunContext ctx{scenario, PhaseObservation(model), model, scenario.tracker_motion(),
                         prior, rec.truth, z};

    for (std::size_t t = 0; t < n_trackers; ++t) {
      const TrackerKind kind = scenario.trackers[t];
      Rng rng(derive_seed(run_seed, 16 + static_cast<std::uint64_t>(kind)));
      auto& track = rec.tracks[t];
      const auto start = Clock::now();
      try {
        if (kind == TrackerKind::kEkf) {
          track_ekf(ctx, track);
        } else if (kind == TrackerKind::kMle) {
          track_mle(ctx, rng, track);
        } else {
          track_pf(ctx, kind, rng, track);
        }
        for (std::size_t k = 0; k < steps; ++k) {
          track[k].error = position_error(track[k].estimate, rec.truth[k]);
          if (!std::isfinite(track[k].error)) track[k].error = kInf;
        }
      } catch (const std::exception& e) {
        rec.failures[t] = e.what();
        for (auto& s : track) {
          s.estimate.setConstant(std::numeric_limits<double>::quiet_NaN());
          s.error = kInf;
        }
      }
      rec.tracker_seconds[t] = std::chrono::duration<double>(Clock::now() - start).count();
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
    for (std::size_t t = 0; t < n_trackers; ++t) {
      rec.failures[t] = e.what();
      for (auto& s : rec.tracks[t]) {
        s.estimate.setConstant(std::numeric_limits<double>::quiet_NaN());
        s.error = kInf;
      }
    }
    rec.truth.assign(steps, State::Constant(std::numeric_limits<double>::quiet_NaN()));
  }
  return rec;
}

Campaign run_campaign(const Scenario& scenario, int threads) {
  scenario.validate();
  Campaign out;
  out.scenario = scenario;
  out.runs.resize(static_cast<std::size_t>(scenario.runs));
  const auto start = Clock::now();

  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(scenario.runs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < scenario.runs; i = next++) {
      out.runs[static_cast<std::size_t>(i)] = run_single(scenario, i);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

std::vector<double> tracker_errors(const Campaign& campaign, std::size_t tracker) {
  std::vector<double> out;
  for (const RunRecord& r : campaign.runs) {
    for (const TrackerStep& s : r.tracks.at(tracker)) out.push_back(s.error);
  }
  return out;
}

std::vector<double> empirical_cdf(const std::vector<double>& errors,
                                  const std::vector<double>& thresholds) {
  if (errors.empty()) throw Error("empirical CDF needs at least one error");
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (double th : thresholds) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), th) - sorted.begin();
    out.push_back(static_cast<double>(count) / static_cast<double>(sorted.size()));
  }
  return out;
}

std::vector<double> empirical_cdf(const Campaign& campaign, std::size_t tracker,
                                  const std::vector<double>& thresholds) {
  return empirical_cdf(tracker_errors(campaign, tracker), thresholds);
}

std::vector<double> cdf_thresholds(double max_m, int count) {
  if (!(max_m > 0.0) || count < 2) throw Error("CDF grid needs max > 0 and at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = max_m * i / (count - 1);
  return out;
}

StepStatistics step_statistics(const Campaign& campaign, std::size_t tracker) {
  const auto steps = static_cast<std::size_t>(campaign.scenario.steps);
  StepStatistics out;
  out.rmse.assign(steps, 0.0);
  out.rmse_se.assign(steps, 0.0);
  const auto n = static_cast<double>(campaign.runs.size());
  for (std::size_t k = 0; k < steps; ++k) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const RunRecord& r : campaign.runs) {
      const double e2 = r.tracks.at(tracker)[k].error * r.tracks.at(tracker)[k].error;
      sum += e2;
      sum_sq += e2 * e2;
    }
    const double mse = sum / n;
    const double var = n > 1.0 ? std::max(0.0, (sum_sq - n * mse * mse) / (n - 1.0)) : 0.0;
    out.rmse[k] = std::sqrt(mse);
    out.rmse_se[k] = out.rmse[k] > 0.0 ? std::sqrt(var / n) / (2.0 * out.rmse[k]) : 0.0;
  }
  return out;
}

TrackerSummary summarize(const Campaign& campaign, std::size_t tracker) {
  TrackerSummary s;
  s.name = tracker_name(campaign.scenario.trackers.at(tracker));
  std::vector<double> errors = tracker_errors(campaign, tracker);
  double sq = 0.0;
  for (double e : errors) sq += e * e;
  s.rmse = std::sqrt(sq / static_cast<double>(errors.size()));
  std::sort(errors.begin(), errors.end());
  const std::size_t n = errors.size();
  s.median_error = n % 2 == 1 ? errors[n / 2] : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
  for (const RunRecord& r : campaign.runs) {
    if (!r.failures.at(tracker).empty()) ++s.failed_runs;
    s.seconds += r.tracker_seconds.at(tracker);
    for (const TrackerStep& st : r.tracks.at(tracker)) {
      s.weight_resets += st.weight_reset ? 1 : 0;
      s.mle_failures += st.mle_failed ? 1 : 0;
      s.regularizations += st.regularized ? 1 : 0;
    }
  }
  s.reset_rate = static_cast<double>(s.weight_resets) / static_cast<double>(n);
  return s;
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

std::string runs_csv(const Campaign& campaign) {
  const auto& trackers = campaign.scenario.trackers;
  std::string out = fmt::format("# nftrack runs.csv schema v{}\n", kCsvSchemaVersion);
  out += "run,k,truth_x,truth_y,truth_z";
  for (TrackerKind t : trackers) {
    const std::string n = tracker_name(t);
    out += fmt::format(",{0}_x,{0}_y,{0}_z,{0}_err", n);
  }
  out += '\n';
  for (const RunRecord& r : campaign.runs) {
    for (std::size_t k = 0; k < r.truth.size(); ++k) {
      out += fmt::format("{},{},{},{},{}", r.run, k + 1, num(r.truth[k](0)), num(r.truth[k](1)),
                         num(r.truth[k](2)));
      for (std::size_t t = 0; t < trackers.size(); ++t) {
        const TrackerStep& s = r.tracks[t][k];
        out += fmt::format(",{},{},{},{}", num(s.estimate(0)), num(s.estimate(1)),
                           num(s.estimate(2)), num(s.error));
      }
      out += '\n';
    }
  }
  return out;
}

std::string cdf_csv(const Campaign& campaign, const std::vector<double>& thresholds) {
  std::string out = fmt::format("# nftrack cdf.csv schema v{}\n", kCsvSchemaVersion);
  out += "tracker,e_th_m,cdf\n";
  for (std::size_t t = 0; t < campaign.scenario.trackers.size(); ++t) {
    const std::string name = tracker_name(campaign.scenario.trackers[t]);
    const auto cdf = empirical_cdf(campaign, t, thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      out += fmt::format("{},{},{}\n", name, num(thresholds[i]), num(cdf[i]));
    }
  }
  return out;
}

std::string summary_json(const Campaign& campaign) {
  nlohmann::json j;
  j["schema_version"] = kCsvSchemaVersion;
  j["runs"] = campaign.scenario.runs;
  j["steps"] = campaign.scenario.steps;
  j["seed"] = campaign.scenario.seed;
  j["wall_seconds"] = campaign.wall_seconds;
  int failed_runs = 0;
  for (const RunRecord& r : campaign.runs) failed_runs += r.error.empty() ? 0 : 1;
  j["failed_runs"] = failed_runs;
  nlohmann::json trackers = nlohmann::json::array();
  for (std::size_t t = 0; t < campaign.scenario.trackers.size(); ++t) {
    const TrackerSummary s = summarize(campaign, t);
    const StepStatistics st = step_statistics(campaign, t);
    nlohmann::json rmse = nlohmann::json::array();
    for (double v : st.rmse) rmse.push_back(finite_or_null(v));
    trackers.push_back({{"name", s.name},
                        {"median_error_m", finite_or_null(s.median_error)},
                        {"rmse_m", finite_or_null(s.rmse)},
                        {"rmse_per_step_m", rmse},
                        {"weight_resets", s.weight_resets},
                        {"weight_reset_rate", s.reset_rate},
                        {"mle_failures", s.mle_failures},
                        {"regularizations", s.regularizations},
                        {"failed_runs", s.failed_runs},
                        {"seconds", s.seconds}});
  }
  j["trackers"] = trackers;
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

void write_campaign(const Campaign& campaign, const std::filesystem::path& out_dir,
                    const std::vector<double>& thresholds) {
  std::filesystem::create_directories(out_dir);
  write_file_atomic(out_dir / "runs.csv", runs_csv(campaign));
  write_file_atomic(out_dir / "cdf.csv", cdf_csv(campaign, thresholds));
  write_file_atomic(out_dir / "summary.json", summary_json(campaign));
}

}  // namespace nftrack
