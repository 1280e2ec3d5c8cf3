#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stride_lab/bench/cli.hpp"

using namespace stride_lab;
using namespace stride_lab::bench;

namespace {

std::size_t count(const std::string& text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::size_t lines(const std::string& text) { return count(text, "\n"); }

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("stride_lab_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "stride_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

}  // namespace

TEST(ParseConfig, MinimalGetsDefaults) {
  const auto cfg = parse_config("scenario = \"track\"\n");
  EXPECT_EQ(cfg.scenario, ScenarioKind::Track);
  EXPECT_EQ(cfg.planner, PlannerId::LS);
  EXPECT_EQ(cfg.seed, 1u);
  EXPECT_EQ(cfg.params, BipedParams{});
  EXPECT_EQ(cfg.command.step_duration, 0.25);
}

TEST(ParseConfig, RejectsStepDurationAboveMaximum) {
  try {
    (void)parse_config("scenario = \"track\"\nstep_duration = 0.5\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("td_max"), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, PlannerNames) {
  EXPECT_EQ(parse_config("planner = \"lipm\"\n").planner, PlannerId::LIPM);
  EXPECT_EQ(parse_config("planner = \"ls\"\n").planner, PlannerId::LS);
  EXPECT_THROW((void)parse_config("planner = \"mpc\"\n"), ValidationError);
}

TEST(ParseConfig, UnknownKeyRejected) {
  try {
    (void)parse_config("[params]\nmas = 4.8\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "params.mas");
  }
  EXPECT_THROW((void)parse_config("speed = 1.0\n"), ValidationError);
}

TEST(ParseConfig, SyntaxErrorReportsLine) {
  try {
    (void)parse_config("scenario = \"track\"\nvx = 0.5\nvy = = 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ParseConfig, DefaultSeedIsOverriddenByFile) {
  EXPECT_EQ(parse_config("", 42).seed, 42u);
  EXPECT_EQ(parse_config("seed = 7\n", 42).seed, 7u);
}

TEST(ParseConfig, RoundTripIsIdentity) {
  const char* text = R"(scenario = "gaps"
planner = "lipm"
seed = 9
steps = 30
vx = 0.45
step_duration = 0.3
foot_noise_sigma = 0.001
balance_layer = false

[params]
mass = 5.1
kp = [0.6, 0.35]

[terrain]
kind = "gapped"
gaps = [[1.0, 1.25], [2.5, 2.6]]
gap_margin = 0.03

[[command]]
t_start = 0.0
vx = 0.2

[[command]]
t_start = 2.0
vx = 0.4
vy = 0.05
step_duration = 0.3

[[push]]
t = 1.0
impulse = 2.5
direction = [0.0, 1.0]
)";
  const auto cfg = parse_config(text);
  EXPECT_EQ(cfg.params.mass, 5.1);
  ASSERT_EQ(cfg.schedule.size(), 2u);
  ASSERT_EQ(cfg.pushes.size(), 1u);
  const auto again = parse_config(serialize_config(cfg));
  EXPECT_EQ(again, cfg);
  EXPECT_EQ(serialize_config(again), serialize_config(cfg));
  for (auto kind : {ScenarioKind::Track, ScenarioKind::PushGrid, ScenarioKind::Rough,
                    ScenarioKind::SweepTd}) {
    const auto p = preset(kind);
    EXPECT_EQ(parse_config(serialize_config(p)), p) << to_string(kind);
  }
}

TEST(Report, StepsCsvShape) {
  auto cfg = preset(ScenarioKind::StepTrack);
  cfg.emit_svg = false;
  const auto res = execute_scenario(cfg);
  const auto& csv = res.artifacts.at("steps.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kStepsHeader);
  EXPECT_EQ(lines(csv), res.log.steps.size() + 1);
  EXPECT_NE(res.summary.find("step_location_mae_m"), nullptr);
}

TEST(Report, ArtifactsAreByteDeterministic) {
  for (auto kind : {ScenarioKind::Track, ScenarioKind::Gaps}) {
    const auto a = execute_scenario(preset(kind));
    const auto b = execute_scenario(preset(kind));
    ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
    for (const auto& [name, text] : a.artifacts) EXPECT_EQ(text, b.artifacts.at(name)) << name;
  }
}

TEST(Report, TrackSummary) {
  const auto res = execute_scenario(preset(ScenarioKind::Track));
  ASSERT_NE(res.summary.find("velocity_mae_mps"), nullptr);
  ASSERT_NE(res.summary.find("velocity_std_mps"), nullptr);
  EXPECT_EQ(res.summary.find("velocity_mae_mps")->units, "m/s");
  EXPECT_TRUE(res.artifacts.count("velocity.svg"));
  EXPECT_EQ(res.artifacts.at("summary.csv").substr(0, 19), "metric,value,units\n");
  EXPECT_EQ(res.exit_code, 0);
}

TEST(Report, PushMapHasOneCirclePerSample) {
  auto cfg = preset(ScenarioKind::PushGrid);
  cfg.push_grid.samples = 100;
  const auto res = execute_scenario(cfg);
  EXPECT_EQ(count(res.artifacts.at("pushmap.svg"), "<circle"), 100u);
  EXPECT_EQ(lines(res.artifacts.at("pushes.csv")), 101u);
  EXPECT_EQ(res.exit_code, 0);
}

TEST(Report, WritesFiles) {
  auto cfg = preset(ScenarioKind::Cot);
  cfg.steps = 30;
  cfg.out_dir = scratch("cot").string();
  const auto res = run_scenario(cfg);
  for (const auto& [name, text] : res.artifacts) {
    EXPECT_EQ(slurp(std::filesystem::path(cfg.out_dir) / name), text) << name;
  }
  EXPECT_NE(res.summary.find("mechanical_cot"), nullptr);
}

TEST(Scenario, TrapezoidSchedule) {
  const auto [schedule, window] = trapezoid_schedule({0.5, 0.0, 0.25}, 2.0, 100);
  SimConfig c;
  c.schedule = schedule;
  EXPECT_EQ(c.command_at(0.0).vx, 0.0);
  EXPECT_EQ(window.size(), 100u);
  for (std::size_t i = window.begin; i < window.end; ++i)
    EXPECT_EQ(c.command_at(0.25 * static_cast<double>(i)).vx, 0.5) << i;
  EXPECT_LT(c.command_at(0.25 * static_cast<double>(window.end)).vx, 0.5);
  EXPECT_LT(c.command_at(0.25 * static_cast<double>(window.begin - 1)).vx, 0.5);
  EXPECT_EQ(schedule.back().command.vx, 0.0);
}

TEST(Scenario, ExitCodes) {
  EXPECT_EQ(exit_code({TerminalKind::Completed, 0, ""}), 0);
  EXPECT_EQ(exit_code({TerminalKind::Fell, 0, ""}), 2);
  EXPECT_EQ(exit_code({TerminalKind::Infeasible, 0, ""}), 3);
}

TEST(Cli, PlanPrintsCsv) {
  std::string out;
  ASSERT_EQ(run_cli({"plan", "--planner", "ls", "--vx", "0.5", "--vy", "0", "--td", "0.25"}, &out), 0);
  EXPECT_EQ(out.substr(0, out.find('\n')),
            "planner,target_x_m,target_y_m,x_step_m,y_step_m,raibert_dx_m,raibert_dy_m,gap_shift_m");
  const std::string row = out.substr(out.find('\n') + 1);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells[0], "ls");
  EXPECT_NEAR(std::stod(cells[3]), 0.125, 1e-12);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}), kExitUsage);
  EXPECT_EQ(run_cli({"dance"}), kExitUsage);
  EXPECT_EQ(run_cli({"preset", "nonesuch"}), kExitUsage);
  EXPECT_EQ(run_cli({"plan", "--td", "0.5"}), kExitUsage);
  EXPECT_EQ(run_cli({"run", "/nonexistent/stride.toml"}), kExitUsage);
}

TEST(Cli, GapPresetCompletesAndWideGapIsInfeasible) {
  const auto dir = scratch("gaps");
  EXPECT_EQ(run_cli({"preset", "gaps", "--out", dir.string()}), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "footfalls.svg"));

  const auto cfg_path = scratch("widegap_cfg");
  std::filesystem::create_directories(cfg_path);
  {
    std::ofstream f(cfg_path / "wide.toml");
    f << "scenario = \"gaps\"\nvx = 0.6\nsteps = 40\n[terrain]\nkind = \"gapped\"\n"
         "gaps = [[1.0, 1.8]]\n";
  }
  const auto out = scratch("widegap");
  EXPECT_EQ(run_cli({"run", (cfg_path / "wide.toml").string(), "--out", out.string()}), 3);
}

TEST(Cli, SeedFromEnvironment) {
  const auto dir_a = scratch("seed_a"), dir_b = scratch("seed_b"), dir_c = scratch("seed_c");
  ::setenv("STRIDE_LAB_SEED", "5", 1);
  ASSERT_EQ(run_cli({"preset", "step-track", "--out", dir_a.string(), "--no-svg"}), 0);
  ASSERT_EQ(run_cli({"preset", "step-track", "--out", dir_b.string(), "--no-svg"}), 0);
  ::setenv("STRIDE_LAB_SEED", "6", 1);
  ASSERT_EQ(run_cli({"preset", "step-track", "--out", dir_c.string(), "--no-svg"}), 0);
  ::setenv("STRIDE_LAB_SEED", "abc", 1);
  EXPECT_EQ(run_cli({"preset", "step-track", "--out", dir_c.string(), "--no-svg"}), kExitUsage);
  ::unsetenv("STRIDE_LAB_SEED");
  EXPECT_EQ(slurp(dir_a / "steps.csv"), slurp(dir_b / "steps.csv"));
  EXPECT_NE(slurp(dir_a / "steps.csv"), slurp(dir_c / "steps.csv"));
  EXPECT_NE(slurp(dir_a / "summary.csv").find("seed,5,"), std::string::npos);
}

TEST(ShippedConfigs, ParseAndRoundTrip) {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(STRIDE_LAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".toml") continue;
    const auto cfg = parse_config(slurp(entry.path()));
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg) << entry.path();
    ++seen;
  }
  EXPECT_GE(seen, 3);
}
