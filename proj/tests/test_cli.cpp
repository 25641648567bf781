#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cascade/commands.hpp"
#include "cascade/config.hpp"
#include "cascade/io.hpp"
#include "cascade/svg.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cascade_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(CASCADE_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void expect_rejects(const std::string& assignment, const std::string& field) {
  RunConfig c;
  try {
    c.apply_override(assignment);
    c.validate();
    FAIL() << "accepted " << assignment;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Config, IniRoundTrip) {
  RunConfig c;
  c.general.sign = -1;
  c.coeffs.lambda = 0.1;
  c.ode.K_list = {4, 8, 16};
  c.growth.t_list = {1.0 / 3.0, 0.1};
  c.solve.window = "[-2,0.5]+[0.5,3]";
  c.compare.J_list = {0, 3};
  const RunConfig back = RunConfig::from_ini(c.to_ini());
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.to_ini(), c.to_ini());
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(RunConfig::from_ini("[ode]\nKK = 3\n"), ConfigError);
  EXPECT_THROW(RunConfig::from_ini("[nonsense]\nx = 1\n"), ConfigError);
  EXPECT_THROW(RunConfig::from_ini("[ode]\nK = three\n"), ConfigError);
  EXPECT_THROW(RunConfig::load("/nonexistent/run.ini"), ConfigError);
}

TEST(Config, ValidationNamesTheField) {
  expect_rejects("coeffs.j_max=0", "coeffs.j_max");
  expect_rejects("general.sign=2", "general.sign");
  expect_rejects("ode.dt=0", "ode.dt");
  expect_rejects("ode.scheme=euler", "ode.scheme");
  expect_rejects("growth.p_list=", "growth.p_list");
  expect_rejects("growth.p_list=0.5,2", "growth.p_list");
  expect_rejects("solve.n_points=1000", "solve.n_points");
  expect_rejects("solve.equation=heat", "solve.equation");
  expect_rejects("compare.window=[1,0]", "compare.window");
  expect_rejects("ode.t_end=0.00005", "ode.t_end");
  EXPECT_THROW(RunConfig{}.apply_override("no_equals_sign"), ConfigError);
  EXPECT_THROW(RunConfig{}.apply_override("ode.nothing=1"), ConfigError);
  EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(Config, OverrideSetsValue) {
  RunConfig c;
  c.apply_override("ode.K = 12");
  c.apply_override("growth.p_list=2,4,8");
  c.apply_override("coeffs.corrupt_parity=true");
  EXPECT_EQ(c.ode.K, 12);
  EXPECT_EQ(c.growth.p_list, (std::vector<double>{2, 4, 8}));
  EXPECT_TRUE(c.coeffs.corrupt_parity);
}

TEST(Commands, CoeffsSmallTable) {
  RunConfig c;
  c.general.out_dir = scratch("coeffs").string();
  c.coeffs.j_max = 2;
  const auto r = run_command("coeffs", c);
  EXPECT_EQ(r.exit_code, kExitOk);
  // header + (k, j) pairs with j < k <= 2
  EXPECT_EQ(line_count(fs::path(c.general.out_dir) / "coeffs.csv"), 1u + 3u);
  EXPECT_TRUE(fs::exists(fs::path(c.general.out_dir) / "manifest_coeffs.json"));
  const auto manifest = nlohmann::json::parse(read_file(fs::path(c.general.out_dir) / "manifest_coeffs.json"));
  EXPECT_EQ(manifest["exit_code"], 0);
  EXPECT_EQ(RunConfig::from_ini(manifest["config_ini"].get<std::string>()), c);
  EXPECT_FALSE(manifest["versions"]["gmp"].get<std::string>().empty());

  c.coeffs.arithmetic = "float";
  EXPECT_EQ(run_command("coeffs", c).exit_code, kExitOk);
  EXPECT_EQ(line_count(fs::path(c.general.out_dir) / "coeffs.csv"), 4u);
}

TEST(Commands, CorruptedParityFailsCoeffs) {
  RunConfig c;
  c.general.out_dir = scratch("parity").string();
  c.coeffs.j_max = 6;
  c.coeffs.corrupt_parity = true;
  const auto r = run_command("coeffs", c);
  EXPECT_EQ(r.exit_code, kExitCheckFailed);
  ASSERT_FALSE(r.failures.empty());
  EXPECT_EQ(r.failures.front(), "coeff_parity");
}

TEST(Commands, OdeZeroLength) {
  RunConfig c;
  c.general.out_dir = scratch("ode0").string();
  c.ode.j_max = c.ode.K = 8;
  c.ode.k_check = c.ode.k_export = 8;
  c.ode.t_end = 0.0;
  const auto r = run_command("ode", c);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(line_count(fs::path(c.general.out_dir) / "gamma.csv"), 1u + 9u);  // header + k = 0..8 at t = 0
}

TEST(Commands, GrowthWithOnePowerWarns) {
  RunConfig c;
  c.general.out_dir = scratch("growth1").string();
  c.growth.p_list = {2};
  const auto r = run_command("growth", c);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.warnings.size(), c.growth.t_list.size());
  EXPECT_EQ(line_count(fs::path(c.general.out_dir) / "fits.csv"), 1u);
}

TEST(Commands, GrowthOutputsAreDeterministic) {
  RunConfig c;
  c.growth.mode = "solver";
  c.growth.n_points = 1 << 12;
  c.growth.dt = 1e-3;
  c.growth.t_list = {0.01, 0.02};
  c.growth.p_list = {2, 4, 8, 16};
  c.general.out_dir = scratch("det_a").string();
  ASSERT_EQ(run_command("growth", c).exit_code, kExitOk);
  const std::string a = read_file(fs::path(c.general.out_dir) / "growth.csv");
  c.general.out_dir = scratch("det_b").string();
  ASSERT_EQ(run_command("growth", c).exit_code, kExitOk);
  EXPECT_EQ(read_file(fs::path(c.general.out_dir) / "growth.csv"), a);
  EXPECT_EQ(read_file(fs::path(c.general.out_dir) / "fits.csv"),
            read_file(fs::temp_directory_path() / "cascade_cli_det_a" / "fits.csv"));
}

TEST(Commands, SolveWritesSnapshots) {
  RunConfig c;
  c.general.out_dir = scratch("solve").string();
  c.solve.n_points = 1 << 10;
  c.solve.dt = 1e-3;
  c.solve.t_end = 0.01;
  c.solve.snapshot_times = {0.005};
  const auto r = run_command("solve", c);
  EXPECT_EQ(r.exit_code, kExitOk);
  // three snapshots; nodes of [-2,3) at stride 8 on a cell of 1/16
  EXPECT_EQ(line_count(fs::path(c.general.out_dir) / "snapshots.csv"), 1u + 3u * 10u);
}

TEST(Svg, WellFormed) {
  LineChart chart{"a < b & c", "x", "y", {{"s1", {0, 1, 2}, {1, NAN, 3}}, {"s2", {0, 2}, {-1, 1e6}}}};
  const std::string svg = render_svg(chart);
  std::istringstream in(svg);
  boost::property_tree::ptree pt;
  ASSERT_NO_THROW(boost::property_tree::read_xml(in, pt));
  EXPECT_EQ(pt.count("svg"), 1u);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_NO_THROW(render_svg(LineChart{}));
}

TEST(Cli, ExitCodes) {
  const std::string out = scratch("exe").string();
  EXPECT_EQ(run_cli("coeffs --out " + out + " --override coeffs.j_max=4"), 0);
  EXPECT_EQ(run_cli("coeffs --out " + out + " --override coeffs.j_max=0"), 2);
  EXPECT_EQ(run_cli("coeffs --out " + out + " --config /nonexistent/run.ini"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("verify --out " + out + " --override verify.corrupt_parity=true --override verify.n_points=4096"),
            1);
  const auto report = nlohmann::json::parse(read_file(fs::path(out) / "verify_report.json"));
  bool named = false;
  for (const auto& c : report["checks"])
    if (c["name"] == "coeff_parity") named = !c["pass"].get<bool>();
  EXPECT_TRUE(named);
}

TEST(Cli, ConfigFileIsRead) {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  RunConfig c;
  c.general.out_dir = (dir / "out").string();
  c.coeffs.j_max = 3;
  write_file_atomic(dir / "run.ini", c.to_ini());
  EXPECT_EQ(run_cli("coeffs --config " + (dir / "run.ini").string()), 0);
  EXPECT_EQ(line_count(dir / "out" / "coeffs.csv"), 1u + 6u);
}

TEST(Config, ShippedDefaultMatchesBuiltIn) {
  EXPECT_EQ(RunConfig::load(fs::path(CASCADE_SOURCE_DIR) / "configs" / "default.ini"), RunConfig{});
}
