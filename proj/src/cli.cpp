#include "nftrack/cli.hpp"

#include "nftrack/fisher.hpp"
#include "nftrack/harness.hpp"

#include <fmt/format.h>

#include <cmath>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

namespace nftrack {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string array_label(const ArraySpec& a) {
  if (a.kind == ArraySpec::Kind::kCircular) return fmt::format("circular_{}", a.n);
  return fmt::format("rectangular_{}x{}", a.n_y, a.n_z);
}

}  // namespace

std::string phase_profile_csv(const Config& config) {
  if (!config.phase_profile) throw ConfigError("phase_profile: missing required section");
  const PhaseProfileSpec& spec = *config.phase_profile;
  const Scenario& sc = config.scenario;
  const MeasurementModel model(sc.array.build(sc.lambda), sc.lambda, sc.sigma);

  std::string out = fmt::format("# nftrack phase_profile.csv schema v{}\n", kCsvSchemaVersion);
  out += "step,x_m,y_m,z_m,antenna,phase_rad\n";
  for (int i = 0; i < spec.points; ++i) {
    const double t = spec.points == 1 ? 0.0 : static_cast<double>(i) / (spec.points - 1);
    const Vec3 p = spec.start + t * (spec.end - spec.start);
    const PhaseVector h = observe_clean(model, p);
    for (Eigen::Index n = 0; n < h.size(); ++n) {
      out += fmt::format("{},{},{},{},{},{}\n", i, num(p(0)), num(p(1)), num(p(2)), n, num(h(n)));
    }
  }
  return out;
}

std::string fim_sweep_csv(const Config& config) {
  if (!config.fim_sweep) throw ConfigError("fim_sweep: missing required section");
  const FimSweepSpec& spec = *config.fim_sweep;
  const double lambda = config.scenario.lambda;
  const double sigma = config.scenario.sigma;

  std::string out = fmt::format("# nftrack fim_sweep.csv schema v{}\n", kCsvSchemaVersion);
  out += "array,diameter_m,fraunhofer_m,d_m,d_over_D,J_d,J_theta,J_phi,sqrt_inv_J_d_m,"
         "threshold_m,beyond_fraunhofer\n";
  for (const ArraySpec& a : spec.arrays) {
    if (a.kind == ArraySpec::Kind::kRectangular && a.spacing != 0.0) {
      throw ConfigError("fim_sweep.arrays: closed forms assume half-wavelength spacing; "
                        "omit spacing_m");
    }
    const double diameter = a.kind == ArraySpec::Kind::kCircular
                                ? a.diameter
                                : rectangular_nhop_diameter(a.n_y, a.n_z, lambda);
    const double d_f = fraunhofer_distance(diameter, lambda);
    const double lo = std::log(spec.d_over_d_min);
    const double hi = std::log(spec.d_over_d_max);
    for (int i = 0; i < spec.points; ++i) {
      const double ratio = std::exp(lo + (hi - lo) * i / (spec.points - 1));
      const double d = ratio * diameter;
      const PolarFim j = a.kind == ArraySpec::Kind::kCircular
                             ? fim_circular(a.n, a.diameter, lambda, sigma, d)
                             : fim_rectangular(a.n_y, a.n_z, lambda, sigma, d);
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", array_label(a), num(diameter),
                         num(d_f), num(d), num(ratio), num(j.range), num(j.elevation),
                         num(j.azimuth), num(1.0 / std::sqrt(j.range)), num(1e-3 * d),
                         d > d_f ? 1 : 0);
    }
  }
  return out;
}

std::string bound_csv(const PcrlbTrace& trace) {
  std::string out = fmt::format("# nftrack bound.csv schema v{}\n", kCsvSchemaVersion);
  out += "k,peb_m,var_x,var_y,var_z,var_vx,var_vy,var_vz,regularized\n";
  for (const PcrlbStep& s : trace.steps) {
    out += fmt::format("{},{}", s.k, num(s.peb));
    for (int i = 0; i < kStateDim; ++i) out += "," + num(s.covariance(i, i));
    out += fmt::format(",{}\n", (s.regularized || trace.process_noise_regularized) ? 1 : 0);
  }
  return out;
}

std::filesystem::path cmd_phase_profile(const Config& config, const std::filesystem::path& out_dir) {
  const std::string csv = phase_profile_csv(config);
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / "phase_profile.csv";
  write_file_atomic(path, csv);
  return path;
}

std::filesystem::path cmd_fim_sweep(const Config& config, const std::filesystem::path& out_dir) {
  const std::string csv = fim_sweep_csv(config);
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / "fim_sweep.csv";
  write_file_atomic(path, csv);
  return path;
}

std::filesystem::path cmd_bound(const Config& config, const std::filesystem::path& out_dir) {
  const PcrlbTrace trace = run_pcrlb(bound_setup(config.scenario));
  const std::string csv = bound_csv(trace);
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / "bound.csv";
  write_file_atomic(path, csv);
  return path;
}

void cmd_track(const Config& config, const std::filesystem::path& out_dir, int threads) {
  const Campaign campaign = run_campaign(config.scenario, threads);
  write_campaign(campaign, out_dir, cdf_thresholds(config.cdf_max_m, config.cdf_points));
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Near-field source tracking from array phase measurements"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int threads = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads, 0 = all cores")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  };
  CLI::App* phase = app.add_subcommand("phase-profile", "differential phases along a line");
  CLI::App* sweep = app.add_subcommand("fim-sweep", "closed-form Fisher information vs distance");
  CLI::App* bound = app.add_subcommand("bound", "posterior Cramer-Rao bound per step");
  CLI::App* track = app.add_subcommand("track", "Monte Carlo tracking campaign");
  for (CLI::App* sub : {phase, sweep, bound, track}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    Config cfg = load_config(config_path);
    if (seed) cfg.scenario.seed = *seed;
    if (phase->parsed()) {
      std::cout << cmd_phase_profile(cfg, out_dir).string() << "\n";
    } else if (sweep->parsed()) {
      std::cout << cmd_fim_sweep(cfg, out_dir).string() << "\n";
    } else if (bound->parsed()) {
      std::cout << cmd_bound(cfg, out_dir).string() << "\n";
    } else {
      cmd_track(cfg, out_dir, threads);
      std::cout << (std::filesystem::path(out_dir) / "summary.json").string() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return kExitOk;
}

}  // namespace nftrack
