#include "nftrack/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nftrack {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Object reader that remembers its path and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    known_.insert(key);
    if (!j_.contains(key)) throw ConfigError(join(path_, key) + ": missing required key");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(join(path_, key) + ": expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  long long integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path_, key) + ": expected an integer");
    return v.get<long long>();
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const long long v = integer(key);
    if (v < -2147483647LL || v > 2147483647LL) {
      throw ConfigError(join(path_, key) + ": integer out of range");
    }
    return static_cast<int>(v);
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(join(path_, key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::size_t expected) {
    const json& v = at(key);
    if (!v.is_array()) throw ConfigError(join(path_, key) + ": expected an array");
    if (expected != 0 && v.size() != expected) {
      throw ConfigError(join(path_, key) + ": expected " + std::to_string(expected) + " numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(join(path_, key) + "[" + std::to_string(i) + "]: expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Vec3 vec3(const std::string& key) {
    const auto v = numbers(key, 3);
    return Vec3(v[0], v[1], v[2]);
  }

  Section child(const std::string& key) { return Section(at(key), join(path_, key)); }
  std::string path(const std::string& key) const { return join(path_, key); }

  /// Throws on the first key that was never queried.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!known_.count(it.key())) throw ConfigError(join(path_, it.key()) + ": unknown key");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

ArraySpec parse_array(Section s) {
  ArraySpec a;
  const std::string kind = s.string("kind");
  if (kind == "rectangular") {
    a.kind = ArraySpec::Kind::kRectangular;
    a.n_y = s.integer("ny", 20);
    a.n_z = s.integer("nz", 20);
    require(a.n_y >= 1, s.path("ny"), "must be >= 1");
    require(a.n_z >= 1, s.path("nz"), "must be >= 1");
    a.spacing = s.number("spacing_m", 0.0);
    require(a.spacing >= 0.0, s.path("spacing_m"), "must be >= 0 (0 selects half a wavelength)");
  } else if (kind == "circular") {
    a.kind = ArraySpec::Kind::kCircular;
    a.n = s.integer("n", 0);
    require(a.n >= 1, s.path("n"), "must be >= 1");
    a.diameter = s.number("diameter_m");
    require(a.diameter > 0.0, s.path("diameter_m"), "must be positive");
  } else {
    throw ConfigError(s.path("kind") + ": expected 'rectangular' or 'circular'");
  }
  if (s.has("reference_m")) a.reference = s.vec3("reference_m");
  s.finish();
  return a;
}

Mat6 diag6(Section& s, const std::string& key) {
  const auto v = s.numbers(key, 6);
  Mat6 m = Mat6::Zero();
  for (int i = 0; i < 6; ++i) {
    require(v[static_cast<std::size_t>(i)] >= 0.0, s.path(key), "variances must be >= 0");
    m(i, i) = v[static_cast<std::size_t>(i)];
  }
  return m;
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }

  Config cfg;
  Scenario& sc = cfg.scenario;
  Section s(root, "");

  if (s.has("array")) sc.array = parse_array(s.child("array"));

  const bool has_lambda = s.has("lambda_m");
  const bool has_freq = s.has("frequency_hz");
  require(!(has_lambda && has_freq), "frequency_hz", "give either lambda_m or frequency_hz");
  if (has_lambda) sc.lambda = s.number("lambda_m");
  if (has_freq) {
    const double f = s.number("frequency_hz");
    require(f > 0.0, "frequency_hz", "must be positive");
    sc.lambda = kSpeedOfLight / f;
  }
  require(sc.lambda > 0.0, "lambda_m", "must be positive");

  if (s.has("sigma_deg")) sc.sigma = deg_to_rad(s.number("sigma_deg"));
  require(sc.sigma > 0.0, "sigma_deg", "must be positive");
  sc.gamma_m = s.number("gamma_m", sc.gamma_m);
  require(sc.gamma_m >= 0.0, "gamma_m", "must be >= 0");
  sc.gamma_t = s.number("gamma_t", sc.gamma_t);
  require(sc.gamma_t >= 0.0, "gamma_t", "must be >= 0");
  sc.tau = s.number("tau_s", sc.tau);
  require(sc.tau > 0.0, "tau_s", "must be positive");
  if (s.has("accel_var_m2_per_step6")) {
    sc.accel_variance = s.vec3("accel_var_m2_per_step6");
    require((sc.accel_variance.array() >= 0.0).all(), "accel_var_m2_per_step6",
            "variances must be >= 0");
  }
  if (s.has("initial_state")) {
    const auto v = s.numbers("initial_state", 6);
    for (int i = 0; i < 6; ++i) sc.initial_state(i) = v[static_cast<std::size_t>(i)];
  }
  if (s.has("prior_cov_diag")) sc.prior_covariance = diag6(s, "prior_cov_diag");
  if (s.has("likelihood_spread_diag")) sc.spread_covariance = diag6(s, "likelihood_spread_diag");

  sc.steps = s.integer("steps", sc.steps);
  require(sc.steps >= 1, "steps", "must be >= 1");
  sc.particles = s.integer("particles", sc.particles);
  require(sc.particles >= 1, "particles", "must be >= 1");
  sc.runs = s.integer("runs", sc.runs);
  require(sc.runs >= 1, "runs", "must be >= 1");
  if (s.has("seed")) {
    const json& v = s.at("seed");
    require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), "seed",
            "expected a nonnegative integer");
    sc.seed = v.get<std::uint64_t>();
  }
  if (s.has("trackers")) {
    const json& v = s.at("trackers");
    require(v.is_array() && !v.empty(), "trackers", "expected a nonempty array of names");
    sc.trackers.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string key = "trackers[" + std::to_string(i) + "]";
      require(v[i].is_string(), key, "expected a string");
      try {
        sc.trackers.push_back(parse_tracker(v[i].get<std::string>()));
      } catch (const Error& e) {
        throw ConfigError(key + ": " + e.what());
      }
    }
  }
  if (s.has("waypoints_m")) {
    const json& v = s.at("waypoints_m");
    require(v.is_array(), "waypoints_m", "expected an array of [x, y, z]");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string key = "waypoints_m[" + std::to_string(i) + "]";
      require(v[i].is_array() && v[i].size() == 3, key, "expected [x, y, z]");
      Vec3 p;
      for (int c = 0; c < 3; ++c) {
        require(v[i][static_cast<std::size_t>(c)].is_number(), key, "expected numbers");
        p(c) = v[i][static_cast<std::size_t>(c)].get<double>();
      }
      sc.waypoints.push_back(p);
    }
  }
  if (s.has("mle")) {
    Section m = s.child("mle");
    sc.mle.starts = m.integer("starts", sc.mle.starts);
    require(sc.mle.starts >= 1, m.path("starts"), "must be >= 1");
    sc.mle.max_iterations = m.integer("max_iter", sc.mle.max_iterations);
    require(sc.mle.max_iterations >= 1, m.path("max_iter"), "must be >= 1");
    sc.mle.gradient_tolerance = m.number("gradient_tol", sc.mle.gradient_tolerance);
    require(sc.mle.gradient_tolerance > 0.0, m.path("gradient_tol"), "must be positive");
    if (m.has("box_half_width_m")) {
      sc.mle_half_width = m.vec3("box_half_width_m");
      require((sc.mle_half_width.array() >= 0.0).all(), m.path("box_half_width_m"),
              "must be >= 0");
    }
    m.finish();
  }
  sc.pinv_tolerance = s.number("pinv_tol", sc.pinv_tolerance);
  require(sc.pinv_tolerance > 0.0 && sc.pinv_tolerance < 1.0, "pinv_tol", "must be in (0, 1)");
  if (s.has("linopt_wrap_residual")) {
    const json& v = s.at("linopt_wrap_residual");
    require(v.is_boolean(), "linopt_wrap_residual", "expected true or false");
    sc.wrap_linopt_residual = v.get<bool>();
  }
  if (s.has("bound")) {
    Section b = s.child("bound");
    sc.bound_trajectories = b.integer("trajectories", sc.bound_trajectories);
    require(sc.bound_trajectories >= 1, b.path("trajectories"), "must be >= 1");
    b.finish();
  }
  if (s.has("cdf")) {
    Section c = s.child("cdf");
    cfg.cdf_max_m = c.number("max_m", cfg.cdf_max_m);
    require(cfg.cdf_max_m > 0.0, c.path("max_m"), "must be positive");
    cfg.cdf_points = c.integer("points", cfg.cdf_points);
    require(cfg.cdf_points >= 2, c.path("points"), "must be >= 2");
    c.finish();
  }
  if (s.has("phase_profile")) {
    Section p = s.child("phase_profile");
    PhaseProfileSpec spec;
    if (p.has("start_m")) spec.start = p.vec3("start_m");
    if (p.has("end_m")) spec.end = p.vec3("end_m");
    spec.points = p.integer("points", spec.points);
    require(spec.points >= 1, p.path("points"), "must be >= 1");
    p.finish();
    cfg.phase_profile = spec;
  }
  if (s.has("fim_sweep")) {
    Section f = s.child("fim_sweep");
    FimSweepSpec spec;
    const json& arrays = f.at("arrays");
    require(arrays.is_array() && !arrays.empty(), f.path("arrays"), "expected a nonempty array");
    for (std::size_t i = 0; i < arrays.size(); ++i) {
      spec.arrays.push_back(
          parse_array(Section(arrays[i], f.path("arrays") + "[" + std::to_string(i) + "]")));
    }
    spec.d_over_d_min = f.number("d_over_D_min", spec.d_over_d_min);
    spec.d_over_d_max = f.number("d_over_D_max", spec.d_over_d_max);
    spec.points = f.integer("points", spec.points);
    require(spec.d_over_d_min > 0.0, f.path("d_over_D_min"), "must be positive");
    require(spec.d_over_d_max > spec.d_over_d_min, f.path("d_over_D_max"),
            "empty sweep range (must exceed d_over_D_min)");
    require(spec.points >= 2, f.path("points"), "must be >= 2");
    f.finish();
    cfg.fim_sweep = spec;
  }
  s.finish();

  try {
    sc.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace nftrack
