#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stride_lab/bench/config.hpp"
#include "stride_lab/bench/report.hpp"
#include "stride_lab/bench/scenario.hpp"
#include "stride_lab/planners.hpp"

namespace stride_lab::bench {

inline constexpr int kExitUsage = 64;
inline constexpr int kExitError = 1;

/// Seed from STRIDE_LAB_SEED, if set to a non-negative integer.
[[nodiscard]] inline std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("STRIDE_LAB_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::uint64_t v = 0;
  const std::string_view s(raw);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ValidationError("STRIDE_LAB_SEED", "expected a non-negative integer");
  return v;
}

[[nodiscard]] inline std::string presets_help() {
  std::string out = "Presets:\n";
  for (const auto& p : kPresets) {
    std::string name(to_string(p.kind));
    name.resize(12, ' ');
    out += "  " + name + std::string(p.summary) + '\n';
  }
  return out;
}

/// One-row CSV of a single plan.
[[nodiscard]] inline std::string plan_csv(const StepPlan& p) {
  std::string out =
      "planner,target_x_m,target_y_m,x_step_m,y_step_m,raibert_dx_m,raibert_dy_m,gap_shift_m\n";
  out += std::string(stride_lab::to_string(p.planner));
  for (double v : {p.target.x, p.target.y, p.heuristic.x, p.heuristic.y, p.raibert_offset.x,
                   p.raibert_offset.y, p.gap_shift}) {
    out += ',' + format_double(v);
  }
  return out + '\n';
}

namespace detail {

inline void print_summary(std::ostream& out, const ScenarioResult& res, const std::string& dir) {
  for (const auto& r : res.summary.rows()) {
    out << r.metric << " = " << r.value << (r.units.empty() ? "" : " " + r.units) << '\n';
  }
  if (!res.artifacts.empty()) {
    out << "wrote";
    for (const auto& [name, text] : res.artifacts) out << ' ' << dir << '/' << name;
    out << '\n';
  }
}

}  // namespace detail

/// Entry point of the `stride_lab` executable. Returns the process exit code:
/// 0 completed, 2 fell, 3 infeasible foothold, 64 usage error, 1 other error.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Reduced-order biped footstep planning benchmarks", "stride_lab"};
  app.footer(presets_help());
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario described by a TOML file");
  std::string config_path;
  run->add_option("config", config_path, "Scenario file (TOML)")->required();
  std::string run_out;
  run->add_option("--out", run_out, "Override the output directory");
  std::optional<std::uint64_t> run_seed;
  run->add_option("--seed", run_seed, "Override the RNG seed");

  auto* plan = app.add_subcommand("plan", "Print one footstep plan as CSV");
  std::string plan_planner = "ls";
  double vx = 0.0, vy = 0.0, td = 0.25;
  double torso_x = 0.0, torso_y = 0.0, avg_vx = 0.0, avg_vy = 0.0;
  std::string swing = "left";
  plan->add_option("--planner", plan_planner, "ls or lipm")->check(CLI::IsMember({"ls", "lipm"}));
  plan->add_option("--vx", vx, "Commanded forward velocity [m/s]");
  plan->add_option("--vy", vy, "Commanded lateral velocity [m/s]");
  plan->add_option("--td", td, "Step duration [s]");
  plan->add_option("--swing", swing, "Swing foot: left or right")
      ->check(CLI::IsMember({"left", "right"}));
  plan->add_option("--torso-x", torso_x, "Torso x at touchdown [m]");
  plan->add_option("--torso-y", torso_y, "Torso y at touchdown [m]");
  plan->add_option("--avg-vx", avg_vx, "Average forward velocity of the last step [m/s]");
  plan->add_option("--avg-vy", avg_vy, "Average lateral velocity of the last step [m/s]");

  auto* pre = app.add_subcommand("preset", "Run a built-in benchmark protocol");
  std::string preset_name;
  pre->add_option("name", preset_name, "Preset name")->required();
  std::string preset_out;
  pre->add_option("--out", preset_out, "Output directory");
  std::optional<std::uint64_t> preset_seed;
  pre->add_option("--seed", preset_seed, "RNG seed");
  std::optional<std::string> ov_planner;
  std::optional<double> ov_vx, ov_vy, ov_td, ov_i_max;
  std::optional<int> ov_steps, ov_samples, ov_trials;
  bool no_svg = false;
  pre->add_option("--planner", ov_planner, "ls or lipm")->check(CLI::IsMember({"ls", "lipm"}));
  pre->add_option("--vx", ov_vx, "Commanded forward velocity [m/s]");
  pre->add_option("--vy", ov_vy, "Commanded lateral velocity [m/s]");
  pre->add_option("--td", ov_td, "Step duration [s]");
  pre->add_option("--steps", ov_steps, "Step budget");
  pre->add_option("--i-max", ov_i_max, "Largest push impulse [N*s]");
  pre->add_option("--samples", ov_samples, "Push samples");
  pre->add_option("--trials", ov_trials, "Rough-terrain trials per level");
  pre->add_flag("--no-svg", no_svg, "Skip SVG output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "stride_lab: " << e.what() << '\n' << "Run with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (*plan) {
      BipedParams params;
      const GaitCommand cmd{vx, vy, td};
      cmd.validate(params);
      HybridState st;
      st.swing_side = swing == "left" ? Side::Left : Side::Right;
      st.torso.pos = {torso_x, torso_y};
      st.stance_foot = {torso_x, torso_y - side_sign(st.swing_side) * params.w_nom};
      st.stance_duration = td;
      st.phase_time = td;
      st.step_start_pos = st.torso.pos - Vec2{avg_vx, avg_vy} * td;
      st.prev_step_avg_vel = {avg_vx, avg_vy};
      const PlannerInput in{st, cmd, {avg_vx, avg_vy}, nullptr};
      out << plan_csv(plan_step(planner_from_string(plan_planner), in, params));
      return 0;
    }

    ScenarioConfig cfg;
    std::string dir;
    if (*run) {
      std::ifstream f(config_path, std::ios::binary);
      if (!f) {
        err << "stride_lab: cannot read " << config_path << '\n';
        return kExitUsage;
      }
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = parse_config(ss.str(), env_seed());
      if (run_seed) cfg.seed = *run_seed;
      if (!run_out.empty()) cfg.out_dir = run_out;
    } else {
      ScenarioKind kind{};
      try {
        kind = scenario_from_string(preset_name);
      } catch (const ValidationError&) {
        err << "stride_lab: unknown preset '" << preset_name << "'\n" << presets_help();
        return kExitUsage;
      }
      cfg = preset(kind);
      if (auto s = env_seed()) cfg.seed = *s;
      if (preset_seed) cfg.seed = *preset_seed;
      cfg.out_dir = preset_out.empty() ? "out/" + preset_name : preset_out;
      if (ov_planner) cfg.planner = planner_from_string(*ov_planner);
      if (ov_vx) cfg.command.vx = *ov_vx;
      if (ov_vy) cfg.command.vy = *ov_vy;
      if (ov_td) cfg.command.step_duration = *ov_td;
      if (ov_steps) cfg.steps = *ov_steps;
      if (ov_i_max) cfg.push_grid.i_max = *ov_i_max;
      if (ov_samples) cfg.push_grid.samples = *ov_samples;
      if (ov_trials) cfg.rough.trials = *ov_trials;
      if (no_svg) cfg.emit_svg = false;
    }
    const ScenarioResult res = run_scenario(cfg);
    detail::print_summary(out, res, cfg.out_dir);
    return res.exit_code;
  } catch (const ParseError& e) {
    err << "stride_lab: config parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "stride_lab: invalid value: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "stride_lab: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace stride_lab::bench
