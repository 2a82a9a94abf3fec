#include "doctest.h"
#include "nftrack/cli.hpp"
#include "nftrack/harness.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace nftrack;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "nftrack");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

const char* kSmallTrack = R"({
  "array": {"kind": "rectangular", "ny": 4, "nz": 4},
  "lambda_m": 0.01,
  "sigma_deg": 20,
  "initial_state": [1.0, -1.0, 1.1, 0.0, 0.3, 0.0],
  "steps": 4,
  "runs": 1,
  "particles": 100,
  "trackers": ["ekf", "pf_prior"],
  "bound": {"trajectories": 5},
  "cdf": {"max_m": 2, "points": 5}
})";

}  // namespace

TEST_CASE("exit codes") {
  TempDir dir("nftrack_cli_codes");
  const fs::path good = dir.write("good.json", kSmallTrack);
  const std::string out = (dir.path() / "out").string();

  SUBCASE("no subcommand is a usage error") { CHECK(run({}).code == kExitConfigError); }
  SUBCASE("missing config flag") { CHECK(run({"bound"}).code == kExitConfigError); }
  SUBCASE("unreadable config") {
    CHECK(run({"bound", "--config", (dir.path() / "nope.json").string()}).code == kExitConfigError);
  }
  SUBCASE("malformed JSON") {
    const fs::path bad = dir.write("bad.json", "{\"steps\": ");
    CHECK(run({"bound", "--config", bad.string()}).code == kExitConfigError);
  }
  SUBCASE("unknown key is named") {
    const fs::path bad = dir.write("bad.json", R"({"steps": 3, "stepz": 4})");
    const CliResult r = run({"bound", "--config", bad.string()});
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("stepz") != std::string::npos);
  }
  SUBCASE("nested unknown key is named with its path") {
    const fs::path bad = dir.write("bad.json", R"({"mle": {"starts": 3, "tries": 4}})");
    const CliResult r = run({"bound", "--config", bad.string()});
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("mle.tries") != std::string::npos);
  }
  SUBCASE("unknown tracker") {
    const fs::path bad = dir.write("bad.json", R"({"trackers": ["ekf", "ukf"]})");
    const CliResult r = run({"track", "--config", bad.string()});
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("ukf") != std::string::npos);
  }
  SUBCASE("both wavelength and frequency") {
    const fs::path bad = dir.write("bad.json", R"({"lambda_m": 0.01, "frequency_hz": 28e9})");
    CHECK(run({"bound", "--config", bad.string()}).code == kExitConfigError);
  }
  SUBCASE("missing section for the command") {
    CHECK(run({"phase-profile", "--config", good.string(), "--out-dir", out}).code == kExitConfigError);
    CHECK(run({"fim-sweep", "--config", good.string(), "--out-dir", out}).code == kExitConfigError);
  }
  SUBCASE("output directory blocked by a file") {
    const fs::path blocker = dir.write("blocker", "x");
    const CliResult r = run({"bound", "--config", good.string(), "--out-dir", (blocker / "sub").string()});
    CHECK(r.code == kExitRunFailure);
  }
  SUBCASE("negative thread count") {
    CHECK(run({"track", "--config", good.string(), "--threads", "-2"}).code == kExitConfigError);
  }
  SUBCASE("successful bound prints the file path") {
    const CliResult r = run({"bound", "--config", good.string(), "--out-dir", out});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("bound.csv") != std::string::npos);
    const auto rows = lines_of(slurp(fs::path(out) / "bound.csv"));
    REQUIRE(rows.size() == 2 + 4);
    CHECK(rows[0] == "# nftrack bound.csv schema v1");
    CHECK(rows[1] == "k,peb_m,var_x,var_y,var_z,var_vx,var_vy,var_vz,regularized");
    CHECK(rows[2].rfind("1,", 0) == 0);
  }
}

TEST_CASE("phase profile") {
  TempDir dir("nftrack_cli_phase");
  SUBCASE("one row per point and antenna") {
    const fs::path cfg = dir.write("p.json", R"({
      "array": {"kind": "rectangular", "ny": 3, "nz": 2, "reference_m": [0, 4, 1]},
      "frequency_hz": 28e9,
      "phase_profile": {"start_m": [1, 0, 1], "end_m": [1, 8, 1], "points": 7}
    })");
    const CliResult r = run({"phase-profile", "--config", cfg.string(), "--out-dir", dir.path().string()});
    REQUIRE(r.code == kExitOk);
    const auto rows = lines_of(slurp(dir.path() / "phase_profile.csv"));
    REQUIRE(rows.size() == 2 + 7 * 6);
    CHECK(rows[0] == "# nftrack phase_profile.csv schema v1");
    CHECK(rows[1] == "step,x_m,y_m,z_m,antenna,phase_rad");
    CHECK(rows.back().rfind("6,1,8,1,5,", 0) == 0);
  }
  SUBCASE("single antenna gives zero phases") {
    const fs::path cfg = dir.write("p.json", R"({
      "array": {"kind": "rectangular", "ny": 1, "nz": 1},
      "phase_profile": {"points": 4}
    })");
    Config c = load_config(cfg);
    const auto rows = lines_of(phase_profile_csv(c));
    REQUIRE(rows.size() == 2 + 4);
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(rows[i].substr(rows[i].rfind(',') + 1) == "0");
  }
}

TEST_CASE("FIM sweep") {
  TempDir dir("nftrack_cli_sweep");
  SUBCASE("rows, header and monotone range bound") {
    const fs::path cfg = dir.write("s.json", R"({
      "frequency_hz": 28e9,
      "sigma_deg": 20,
      "fim_sweep": {"arrays": [{"kind": "circular", "n": 400, "diameter_m": 0.14},
                               {"kind": "rectangular", "ny": 20, "nz": 20}],
                    "d_over_D_min": 0.1, "d_over_D_max": 1000, "points": 50}
    })");
    const CliResult r = run({"fim-sweep", "--config", cfg.string(), "--out-dir", dir.path().string()});
    REQUIRE(r.code == kExitOk);
    const auto rows = lines_of(slurp(dir.path() / "fim_sweep.csv"));
    REQUIRE(rows.size() == 2 + 100);
    CHECK(rows[0] == "# nftrack fim_sweep.csv schema v1");
    CHECK(rows[1] ==
          "array,diameter_m,fraunhofer_m,d_m,d_over_D,J_d,J_theta,J_phi,sqrt_inv_J_d_m,threshold_m,beyond_fraunhofer");
    CHECK(rows[2].rfind("circular_400,", 0) == 0);
    CHECK(rows.back().rfind("rectangular_20x20,", 0) == 0);
  }
  SUBCASE("empty sweep range is a config error") {
    const fs::path cfg = dir.write("s.json", R"({
      "fim_sweep": {"arrays": [{"kind": "rectangular", "ny": 2, "nz": 2}],
                    "d_over_D_min": 10, "d_over_D_max": 10}
    })");
    const CliResult r = run({"fim-sweep", "--config", cfg.string(), "--out-dir", dir.path().string()});
    CHECK(r.code == kExitConfigError);
    CHECK(r.err.find("d_over_D_max") != std::string::npos);
  }
  SUBCASE("empty array list is a config error") {
    const fs::path cfg = dir.write("s.json", R"({"fim_sweep": {"arrays": []}})");
    CHECK(run({"fim-sweep", "--config", cfg.string(), "--out-dir", dir.path().string()}).code ==
          kExitConfigError);
  }
}

TEST_CASE("track command") {
  TempDir dir("nftrack_cli_track");
  const fs::path cfg = dir.write("t.json", kSmallTrack);
  const fs::path a = dir.path() / "a";
  const fs::path b = dir.path() / "b";
  REQUIRE(run({"track", "--config", cfg.string(), "--out-dir", a.string()}).code == kExitOk);
  REQUIRE(run({"track", "--config", cfg.string(), "--out-dir", b.string(), "--threads", "2"}).code ==
          kExitOk);
  CHECK(slurp(a / "runs.csv") == slurp(b / "runs.csv"));
  CHECK(slurp(a / "cdf.csv") == slurp(b / "cdf.csv"));
  const auto rows = lines_of(slurp(a / "runs.csv"));
  REQUIRE(rows.size() == 2 + 4);
  CHECK(rows[1] == "run,k,truth_x,truth_y,truth_z,ekf_x,ekf_y,ekf_z,ekf_err,pf_prior_x,pf_prior_y,pf_prior_z,pf_prior_err");
  const auto cdf = lines_of(slurp(a / "cdf.csv"));
  CHECK(cdf.size() == 2 + 2 * 5);
  CHECK(slurp(a / "summary.json").find("\"pf_prior\"") != std::string::npos);

  // The seed flag overrides the config.
  const fs::path c = dir.path() / "c";
  REQUIRE(run({"track", "--config", cfg.string(), "--out-dir", c.string(), "--seed", "99"}).code == kExitOk);
  CHECK(slurp(a / "runs.csv") != slurp(c / "runs.csv"));
}
