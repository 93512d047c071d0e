#include <catch_amalgamated.hpp>

#include <qpump/cli.hpp>

#include <json.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qpump;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("qpump_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
  [[nodiscard]] std::string str() const { return path.string(); }
};

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

nlohmann::json json_of(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("derive prints the derived quantities", "[cli]") {
  const Invocation r = invoke({"derive"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK_THAT(j["r0_um"].get<double>(), WithinAbs(5.255, 1e-3));
  CHECK_THAT(j["sigma_nm"].get<double>(), WithinAbs(77.37, 0.03));
  CHECK_THAT(j["doppler_offresonant_khz"].get<double>(), WithinAbs(76.0, 0.5));
  CHECK_THAT(j["cycle_us"].get<double>(), WithinAbs(83.156, 1e-3));
  CHECK_THAT(j["total_ms"].get<double>(), WithinAbs(2.495, 1e-3));
  CHECK(j["unconventional_pumping"].get<bool>());
  CHECK(j["rabi_source"] == "config");

  const Invocation tp = invoke({"derive", "--set", "omega_a_mhz=40", "--set", "omega_b_mhz=2", "--set",
                                "delta1_mhz=50", "--set", "delta2_mhz=1000", "--set", "temperature_uk=1"});
  REQUIRE(tp.code == 0);
  const auto k = nlohmann::json::parse(tp.out);
  CHECK(k["rabi_source"] == "two_photon");
  CHECK_THAT(k["omega2_mhz"].get<double>(), WithinRel(0.04, 1e-12));
  CHECK_THAT(k["sigma_nm"].get<double>(), WithinAbs(24.47, 0.03));
}

TEST_CASE("simulate writes a trajectory and a summary", "[cli]") {
  TempDir dir;
  const Invocation r = invoke({"simulate", "--cycles", "2", "--out", dir.str()});
  REQUIRE(r.code == 0);
  const auto rows = lines_of(dir.path / "trajectory.csv");
  REQUIRE(rows.size() == 14);
  CHECK(rows[0] == "cycle,step,t_us,fidelity,purity,pop_A,pop_B,pop_C,pop_rplus,pop_rminus,trace_err,min_eig");
  CHECK(rows[1].starts_with("0,0,0,"));
  const auto summary = json_of(dir.path / "summary.json");
  CHECK(summary["n_cycles"] == 2);
  CHECK(summary["samples"] == 13);
  CHECK(summary["parameters"]["plain"]["model"] == "effective");
  // the last CSV row carries the same fidelity as the summary
  std::istringstream last(rows.back());
  std::string field;
  for (int i = 0; i < 4; ++i) std::getline(last, field, ',');
  CHECK(std::stod(field) == summary["final_fidelity"].get<double>());
  CHECK_THAT(summary["total_time_us"].get<double>(), WithinAbs(2 * 83.1565, 1e-3));
}

TEST_CASE("simulate reads config files", "[cli]") {
  TempDir dir;
  fs::create_directories(dir.path);
  const fs::path cfg = dir.path / "run.cfg";
  std::ofstream(cfg) << "cycles = 1\ninitial_state = ghz\n";
  const Invocation r = invoke({"simulate", "--config", cfg.string(), "--out", (dir.path / "out").string()});
  REQUIRE(r.code == 0);
  const auto summary = json_of(dir.path / "out" / "summary.json");
  CHECK_THAT(summary["final_fidelity"].get<double>(), WithinAbs(1.0, 1e-9));

  std::ofstream(cfg) << "cycles = 1\nbogus = 3\n";
  const Invocation bad = invoke({"simulate", "--config", cfg.string(), "--out", dir.str()});
  CHECK(bad.code == 2);
  CHECK_THAT(bad.err, ContainsSubstring("run.cfg:2"));
}

TEST_CASE("sweep writes a grid", "[cli]") {
  TempDir dir;
  const Invocation r = invoke({"sweep", "--cycles", "1", "--axis", "delta_t_rel=-0.1,0,0.1", "--axis",
                               "omega2=0.04,0.05", "--workers", "2", "--out", dir.str()});
  REQUIRE(r.code == 0);
  const auto rows = lines_of(dir.path / "grid.csv");
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "axis1,axis2,final_fidelity,final_purity");
  CHECK(rows[1].starts_with("-0.1,0.04,"));
  CHECK(rows[2].starts_with("-0.1,0.05,"));
  const auto meta = json_of(dir.path / "metadata.json");
  CHECK(meta["failed_cells"] == 0);
  CHECK(meta["rows"] == 3);
  CHECK(meta["cols"] == 2);
  CHECK(meta["workers"] == 2);
}

TEST_CASE("sweep reports failed cells with exit code 4", "[cli][error]") {
  TempDir dir;
  const Invocation r = invoke({"sweep", "--cycles", "1", "--axis", "n_cycles=1,1.5", "--out", dir.str()});
  CHECK(r.code == 4);
  const auto rows = lines_of(dir.path / "grid.csv");
  REQUIRE(rows.size() == 3);
  CHECK_THAT(rows[2], ContainsSubstring("nan"));
  const auto meta = json_of(dir.path / "metadata.json");
  CHECK(meta["failed_cells"] == 1);
  CHECK(meta["failures"][0]["cell"] == 1);
}

TEST_CASE("configuration errors exit with code 2", "[cli][error]") {
  TempDir dir;
  CHECK(invoke({"sweep", "--axis", "delta_r=0,0.01", "--out", dir.str()}).code == 2);
  CHECK(invoke({"sweep", "--out", dir.str()}).code == 2);
  CHECK(invoke({"sweep", "--axis", "delta_r=0", "--axis", "doppler=0", "--axis", "omega2=0.04"}).code == 2);
  CHECK(invoke({"simulate", "--set", "omega2_mhz=-1", "--out", dir.str()}).code == 2);
  CHECK(invoke({"simulate", "--model", "exact"}).code == 2);
  CHECK(invoke({"simulate", "--preset", "fig9"}).code == 2);
  CHECK(invoke({"launch"}).code == 2);
  CHECK(invoke({}).code == 2);
  const Invocation r = invoke({"derive", "--set", "delta2_mhz=-200", "--set", "omega_a_mhz=40", "--set",
                               "omega_b_mhz=2", "--set", "delta1_mhz=50"});
  CHECK(r.code == 2);
  CHECK_THAT(r.err, ContainsSubstring("DegenerateDetuning"));
}

TEST_CASE("validate", "[cli]") {
  const Invocation ok = invoke({"validate"});
  CHECK(ok.code == 0);
  CHECK_THAT(ok.out, ContainsSubstring("[PASS] null_space_is_ghz"));
  CHECK_THAT(ok.out, !ContainsSubstring("[FAIL]"));
  const Invocation bad = invoke({"validate", "--set", "c6_cross_ghz_um6=4213"});
  CHECK(bad.code == 5);
  CHECK_THAT(bad.out, ContainsSubstring("[FAIL] matching_distance"));
}

TEST_CASE("error codes map to exit codes", "[cli]") {
  CHECK(cli::exit_code_for(Error(ErrorCode::NumericalHealth, "x")) == 3);
  CHECK(cli::exit_code_for(Error(ErrorCode::NotHermitian, "x")) == 3);
  CHECK(cli::exit_code_for(Error(ErrorCode::Config, "x")) == 2);
  CHECK(cli::exit_code_for(Error(ErrorCode::InvalidParams, "x")) == 2);
}
