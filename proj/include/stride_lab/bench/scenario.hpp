#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stride_lab/bench/config.hpp"
#include "stride_lab/bench/report.hpp"
#include "stride_lab/errors.hpp"
#include "stride_lab/lip_sim.hpp"
#include "stride_lab/metrics.hpp"

namespace stride_lab::bench {

struct PresetInfo {
  ScenarioKind kind;
  std::string_view summary;
};

/// One line per preset for the help text.
inline constexpr std::array<PresetInfo, 8> kPresets{{
    {ScenarioKind::Track,
     "velocity tracking: 0 -> 0.5 m/s trapezoid, 2 s ramps, 100-step hold at 0.25 s steps; MAE/std on the hold"},
    {ScenarioKind::StepTrack,
     "step-location tracking: 0.6 m/s for 20 steps with 2 mm foot placement noise; planned vs executed MAE"},
    {ScenarioKind::Cot,
     "cost of transport: flat ground, 0.6 m/s, 100 steps; mechanical CoT for both planners"},
    {ScenarioKind::PushGrid,
     "push recovery: standing gait, 500 pushes (20 impulses up to 7 N*s x 25 directions), 3 s to recover"},
    {ScenarioKind::Rough,
     "rough terrain: 0.5 m/s for 5 s, blind, 100 trials per roughness level up to 3 cm"},
    {ScenarioKind::Gaps,
     "gap crossing: 0.6 m/s over one 0.25 m gap at x = 1.0 m, footholds shifted to solid ground"},
    {ScenarioKind::SweepTd,
     "step-duration sweep: 0.4 m/s, 100 steps at each of 0.20 ... 0.40 s"},
    {ScenarioKind::PlanOnce, "single footstep plan from the steady gait at 0.5 m/s"},
}};

[[nodiscard]] inline ScenarioConfig preset(ScenarioKind kind) {
  ScenarioConfig c;
  c.scenario = kind;
  switch (kind) {
    case ScenarioKind::Track:
      c.command = {0.5, 0.0, 0.25};
      c.steps = 100;
      c.track.ramp_s = 2.0;
      break;
    case ScenarioKind::StepTrack:
      c.command = {0.6, 0.0, 0.25};
      c.steps = 20;
      c.warmup_steps = 0;
      c.foot_noise_sigma = 0.002;
      break;
    case ScenarioKind::Cot:
      c.command = {0.6, 0.0, 0.25};
      c.steps = 100;
      break;
    case ScenarioKind::PushGrid:
      c.command = {0.0, 0.0, 0.25};
      c.push_grid = {7.0, 500};
      break;
    case ScenarioKind::Rough:
      c.command = {0.5, 0.0, 0.25};
      c.steps = 0;
      c.duration_s = kTerrainTrialDuration;
      c.terrain.kind = Terrain::Kind::Rough;
      c.terrain.h_max = 0.02;
      break;
    case ScenarioKind::Gaps:
      c.command = {0.6, 0.0, 0.25};
      c.steps = 40;
      c.terrain.kind = Terrain::Kind::Gapped;
      c.terrain.gaps = {{1.0, 1.25}};
      break;
    case ScenarioKind::SweepTd:
      c.command = {0.4, 0.0, 0.25};
      c.steps = 100;
      break;
    case ScenarioKind::PlanOnce:
      c.command = {0.5, 0.0, 0.25};
      c.steps = 1;
      c.warmup_steps = 0;
      break;
  }
  return c;
}

[[nodiscard]] inline ScenarioConfig preset(std::string_view name) {
  return preset(scenario_from_string(name));
}

[[nodiscard]] inline int exit_code(const TerminalStatus& status) {
  switch (status.kind) {
    case TerminalKind::Fell:
      return 2;
    case TerminalKind::Infeasible:
      return 3;
    case TerminalKind::Completed:
      break;
  }
  return 0;
}

[[nodiscard]] inline std::string_view to_string(TerminalKind k) {
  switch (k) {
    case TerminalKind::Fell:
      return "fell";
    case TerminalKind::Infeasible:
      return "infeasible";
    case TerminalKind::Completed:
      break;
  }
  return "completed";
}

struct ScenarioResult {
  EpisodeLog log;
  Summary summary;
  /// File name -> contents, in emission order.
  std::map<std::string, std::string> artifacts;
  int exit_code = 0;
};

/// Trapezoidal forward-velocity schedule: ramp up, hold for `hold_steps`, ramp
/// down, one command per step. Returns the schedule and the hold window.
[[nodiscard]] inline std::pair<std::vector<ScheduledCommand>, StepWindow> trapezoid_schedule(
    const GaitCommand& peak, double ramp_s, int hold_steps) {
  const double T = peak.step_duration;
  const int ramp = static_cast<int>(std::lround(ramp_s / T));
  std::vector<ScheduledCommand> out;
  auto at = [&](int k, double frac) {
    GaitCommand c = peak;
    c.vx = peak.vx * frac;
    c.vy = peak.vy * frac;
    out.push_back({k * T, c});
  };
  for (int k = 0; k < ramp; ++k) at(k, static_cast<double>(k) / ramp);
  at(ramp, 1.0);
  for (int j = 0; j < ramp; ++j) at(ramp + hold_steps + j, static_cast<double>(ramp - 1 - j) / ramp);
  const auto b = static_cast<std::size_t>(ramp);
  return {out, StepWindow{b, b + static_cast<std::size_t>(hold_steps)}};
}

namespace detail {

inline StepWindow steady_window(const ScenarioConfig& cfg, const EpisodeLog& log) {
  return {static_cast<std::size_t>(cfg.warmup_steps), log.steps.size()};
}

inline void add_episode_rows(Summary& s, const ScenarioConfig& cfg, const EpisodeLog& log) {
  s.add_text("scenario", std::string(to_string(cfg.scenario)));
  s.add_text("planner", std::string(stride_lab::to_string(cfg.planner)));
  s.add("seed", static_cast<double>(cfg.seed), "");
  s.add("steps_logged", static_cast<double>(log.steps.size()), "count");
  s.add_text("terminal_status", std::string(to_string(log.status.kind)));
}

inline void add_tracking_rows(Summary& s, const EpisodeLog& log, StepWindow w) {
  if (w.size() == 0 || log.steps.size() < w.end) return;
  const auto x = velocity_tracking_stats(log, Axis::X, w);
  const auto y = velocity_tracking_stats(log, Axis::Y, w);
  s.add("velocity_mae_mps", x.mae, "m/s");
  s.add("velocity_std_mps", x.std, "m/s");
  s.add("lateral_velocity_mae_mps", y.mae, "m/s");
  s.add("window_steps", static_cast<double>(x.n_steps), "count");
}

inline std::string level_tag(double v) { return format_double(v); }

}  // namespace detail

/// Runs a scenario and returns its artifacts without touching the disk.
[[nodiscard]] inline ScenarioResult execute_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioResult res;
  SimConfig sim = cfg.sim();
  StepWindow window{};
  bool have_window = true;

  switch (cfg.scenario) {
    case ScenarioKind::Track: {
      if (cfg.schedule.empty()) {
        auto [sched, w] = trapezoid_schedule(cfg.command, cfg.track.ramp_s, cfg.steps);
        sim.schedule = std::move(sched);
        sim.max_steps = static_cast<int>(w.end) + static_cast<int>(w.begin);
        window = w;
      }
      res.log = simulate_episode(sim);
      if (!cfg.schedule.empty()) window = detail::steady_window(cfg, res.log);
      detail::add_episode_rows(res.summary, cfg, res.log);
      detail::add_tracking_rows(res.summary, res.log, window);
      break;
    }
    case ScenarioKind::StepTrack: {
      res.log = simulate_episode(sim);
      detail::add_episode_rows(res.summary, cfg, res.log);
      if (!res.log.steps.empty())
        res.summary.add("step_location_mae_m", step_location_mae(res.log), "m");
      detail::add_tracking_rows(res.summary, res.log, detail::steady_window(cfg, res.log));
      break;
    }
    case ScenarioKind::Cot: {
      res.log = simulate_episode(sim);
      detail::add_episode_rows(res.summary, cfg, res.log);
      const auto own = cost_of_transport(res.log, cfg.params);
      res.summary.add("mechanical_cot", own.mechanical_cot, "J/(kg*m)");
      res.summary.add("positive_work_j", own.positive_work, "J");
      res.summary.add("distance_m", own.distance, "m");
      double cot[2] = {0.0, 0.0};
      for (PlannerId id : {PlannerId::LS, PlannerId::LIPM}) {
        SimConfig other = sim;
        other.planner = id;
        const auto log = id == cfg.planner ? res.log : simulate_episode(other);
        cot[static_cast<int>(id)] = cost_of_transport(log, cfg.params).mechanical_cot;
        res.summary.add("mechanical_cot_" + std::string(stride_lab::to_string(id)),
                        cot[static_cast<int>(id)], "J/(kg*m)");
      }
      res.summary.add_text("cot_ordering", cot[0] < cot[1]   ? "ls<lipm"
                                           : cot[0] > cot[1] ? "ls>lipm"
                                                             : "ls=lipm");
      detail::add_tracking_rows(res.summary, res.log, detail::steady_window(cfg, res.log));
      break;
    }
    case ScenarioKind::PushGrid: {
      const auto grid = push_recovery_grid(sim, cfg.push_grid.i_max, cfg.push_grid.samples);
      // Reference run: the same standing gait without the push.
      SimConfig ref = sim;
      ref.schedule = {{0.0, GaitCommand{0.0, 0.0, cfg.command.step_duration}}};
      ref.max_steps = 0;
      ref.duration = push_time(ref) + kPushRecoveryWindow;
      res.log = simulate_episode(ref);
      detail::add_episode_rows(res.summary, cfg, res.log);
      res.summary.add("recovery_rate", grid.success_rate, "fraction");
      res.summary.add("samples", static_cast<double>(grid.samples.size()), "count");
      res.summary.add("i_max_ns", cfg.push_grid.i_max, "N*s");
      std::vector<std::vector<std::string>> rows;
      for (const auto& s : grid.samples)
        rows.push_back({format_double(s.impulse), format_double(s.angle), s.recovered ? "1" : "0"});
      if (cfg.emit_csv) res.artifacts["pushes.csv"] = csv_table("impulse_ns,angle_rad,recovered", rows);
      if (cfg.emit_svg) res.artifacts["pushmap.svg"] = pushmap_svg(grid, cfg.push_grid.i_max);
      have_window = false;
      break;
    }
    case ScenarioKind::Rough: {
      const auto rates = terrain_success_rate(sim, cfg.rough.h_max, cfg.rough.trials);
      // Representative episode: trial 0 at the configured roughness.
      SimConfig rep = sim;
      rep.terrain = Terrain::rough(cfg.terrain.h_max, cfg.terrain.seed.value_or(trial_seed(cfg.seed, 0)));
      rep.rng_seed = trial_seed(cfg.seed, 0);
      rep.max_steps = 0;
      rep.duration = kTerrainTrialDuration;
      res.log = simulate_episode(rep);
      detail::add_episode_rows(res.summary, cfg, res.log);
      std::vector<std::vector<std::string>> rows;
      for (const auto& [h, rate] : rates) {
        res.summary.add("success_rate_h" + detail::level_tag(h), rate, "fraction");
        rows.push_back({format_double(h), format_double(rate)});
      }
      if (cfg.emit_csv) res.artifacts["rough.csv"] = csv_table("h_max_m,success_rate", rows);
      have_window = false;
      break;
    }
    case ScenarioKind::Gaps: {
      res.log = simulate_episode(sim);
      detail::add_episode_rows(res.summary, cfg, res.log);
      int inside = 0;
      int shifted = 0;
      for (const auto& s : res.log.steps) {
        for (const auto& g : sim.terrain.gaps()) {
          const double x = s.executed_foot.x;
          if (x > g.begin - cfg.terrain.gap_margin && x < g.end + cfg.terrain.gap_margin) ++inside;
        }
        if (s.plan.gap_shift != 0.0) ++shifted;
      }
      res.summary.add("footfalls_in_gap", inside, "count");
      res.summary.add("shifted_steps", shifted, "count");
      if (!res.log.steps.empty()) {
        const auto& last = res.log.steps.back();
        res.summary.add("final_foot_x_m", last.executed_foot.x, "m");
      }
      if (cfg.emit_svg) res.artifacts["footfalls.svg"] = footfalls_svg(res.log, sim.terrain);
      have_window = false;
      break;
    }
    case ScenarioKind::SweepTd: {
      std::vector<std::vector<std::string>> rows;
      int worst = 0;
      for (double td : cfg.sweep.step_durations) {
        SimConfig s = sim;
        for (auto& sc : s.schedule) sc.command.step_duration = td;
        const auto log = simulate_episode(s);
        worst = std::max(worst, exit_code(log.status));
        const StepWindow w{static_cast<std::size_t>(cfg.warmup_steps), log.steps.size()};
        std::string mae = "nan", sd = "nan";
        if (w.size() > 0 && log.completed()) {
          const auto st = velocity_tracking_stats(log, Axis::X, w);
          mae = format_double(st.mae);
          sd = format_double(st.std);
          res.summary.add_text("velocity_mae_mps_td" + detail::level_tag(td), mae, "m/s");
        }
        rows.push_back({format_double(td), mae, sd, std::string(to_string(log.status.kind))});
      }
      res.log = simulate_episode(sim);
      detail::add_episode_rows(res.summary, cfg, res.log);
      if (cfg.emit_csv)
        res.artifacts["sweep.csv"] =
            csv_table("step_duration_s,velocity_mae_mps,velocity_std_mps,status", rows);
      res.exit_code = worst;
      have_window = false;
      break;
    }
    case ScenarioKind::PlanOnce: {
      sim.max_steps = 1;
      sim.duration = 0.0;
      res.log = simulate_episode(sim);
      detail::add_episode_rows(res.summary, cfg, res.log);
      if (!res.log.steps.empty()) {
        const auto& p = res.log.steps.front().plan;
        res.summary.add("plan_x_m", p.target.x, "m");
        res.summary.add("plan_y_m", p.target.y, "m");
        res.summary.add("heuristic_x_m", p.heuristic.x, "m");
        res.summary.add("heuristic_y_m", p.heuristic.y, "m");
      }
      have_window = false;
      break;
    }
  }

  if (cfg.emit_csv) {
    res.artifacts["steps.csv"] = steps_csv(res.log);
    res.artifacts["summary.csv"] = res.summary.csv();
  }
  if (cfg.emit_svg && (have_window || cfg.scenario == ScenarioKind::SweepTd ||
                       cfg.scenario == ScenarioKind::PlanOnce)) {
    res.artifacts["velocity.svg"] = velocity_svg(res.log);
  }
  res.exit_code = std::max(res.exit_code, cfg.scenario == ScenarioKind::PushGrid ||
                                                  cfg.scenario == ScenarioKind::Rough
                                              ? 0
                                              : exit_code(res.log.status));
  return res;
}

/// Runs a scenario and writes its artifacts under `cfg.out_dir`.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  ScenarioResult res = execute_scenario(cfg);
  const std::filesystem::path dir(cfg.out_dir);
  for (const auto& [name, text] : res.artifacts) write_text_file(dir / name, text);
  return res;
}

}  // namespace stride_lab::bench
