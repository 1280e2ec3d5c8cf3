#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "stride_lab/errors.hpp"
#include "stride_lab/lip_sim.hpp"
#include "stride_lab/model.hpp"

namespace stride_lab {

enum class Axis { X = 0, Y = 1 };

/// Half-open range of step indices [begin, end) into EpisodeLog::steps.
struct StepWindow {
  std::size_t begin = 20;
  std::size_t end = 120;
  [[nodiscard]] std::size_t size() const { return end > begin ? end - begin : 0; }
};

struct TrackingStats {
  double mae = 0.0;
  double std = 0.0;
  std::size_t n_steps = 0;
};

/// Error statistics of the step-average velocity against the command.
[[nodiscard]] inline TrackingStats velocity_tracking_stats(const EpisodeLog& log, Axis axis,
                                                           StepWindow window) {
  if (window.size() == 0) throw EmptyWindow("tracking window is empty");
  if (log.steps.size() < window.end)
    throw EmptyWindow("log has " + std::to_string(log.steps.size()) + " steps, window ends at " +
                      std::to_string(window.end));
  const int a = static_cast<int>(axis);
  const auto n = static_cast<double>(window.size());
  double abs_sum = 0.0;
  double sum = 0.0;
  for (std::size_t i = window.begin; i < window.end; ++i) {
    const double e = log.steps[i].v_step_avg[a] - log.steps[i].v_desired[a];
    abs_sum += std::abs(e);
    sum += e;
  }
  const double mean = sum / n;
  double sq = 0.0;
  for (std::size_t i = window.begin; i < window.end; ++i) {
    const double d = log.steps[i].v_step_avg[a] - log.steps[i].v_desired[a] - mean;
    sq += d * d;
  }
  return {abs_sum / n, std::sqrt(sq / n), window.size()};
}

/// Mean Euclidean distance between planned and executed footholds.
[[nodiscard]] inline double step_location_mae(const EpisodeLog& log) {
  if (log.steps.empty()) throw EmptyLog("step_location_mae needs at least one step");
  double sum = 0.0;
  for (const auto& s : log.steps) sum += (s.executed_foot - s.plan.target).norm();
  return sum / static_cast<double>(log.steps.size());
}

struct CotReport {
  double mechanical_cot = 0.0;
  double distance = 0.0;
  double positive_work = 0.0;
};

/// Mechanical cost of transport: positive leg work per weight and distance.
[[nodiscard]] inline CotReport cost_of_transport(const EpisodeLog& log, const BipedParams& params) {
  CotReport out;
  double dx = 0.0;
  for (const auto& s : log.steps) {
    out.positive_work += s.positive_work;
    dx += s.v_step_avg.x * s.stance_duration;
  }
  out.distance = std::abs(dx);
  if (out.distance < 1e-6) throw ZeroDistance("net forward displacement below 1e-6 m");
  out.mechanical_cot = out.positive_work / (params.mass * params.gravity * out.distance);
  return out;
}

struct PushSample {
  double impulse = 0.0;
  double angle = 0.0;
  bool recovered = false;
};

struct PushGrid {
  std::vector<PushSample> samples;
  double success_rate = 0.0;
};

inline constexpr int kPushImpulseLevels = 20;
inline constexpr int kPushStartStep = 5;
inline constexpr double kPushRecoveryWindow = 3.0;

/// Impulse and direction of push sample `i` out of `n`: impulse level
/// (i mod 20) + 1 of 20, direction index i / 20 of ceil(n / 20) evenly spaced
/// over [0, 2 pi).
[[nodiscard]] inline std::pair<double, double> push_sample_point(int i, int n, double i_max) {
  const int n_angles = (n + kPushImpulseLevels - 1) / kPushImpulseLevels;
  const int level = i % kPushImpulseLevels + 1;
  const int k = i / kPushImpulseLevels;
  return {i_max * level / kPushImpulseLevels,
          2.0 * std::numbers::pi * k / n_angles};
}

/// Time of the push: mid-stance of step 5 of the base command.
[[nodiscard]] inline double push_time(const SimConfig& base) {
  const double T = base.command_at(0.0).step_duration;
  return (kPushStartStep + 0.5) * T;
}

/// Stepping in place with one push per sample; recovered means no fall within
/// 3 s of the push.
[[nodiscard]] inline PushGrid push_recovery_grid(const SimConfig& base, double i_max,
                                                 int n_samples) {
  if (n_samples < 1) throw ConfigInvalid("push grid needs n_samples >= 1");
  if (!(i_max > 0.0)) throw ConfigInvalid("push grid needs i_max > 0");
  SimConfig cfg = base;
  GaitCommand cmd = base.command_at(0.0);
  cmd.vx = 0.0;
  cmd.vy = 0.0;
  cfg.schedule = {{0.0, cmd}};
  cfg.initial_state.reset();
  const double t_push = push_time(cfg);
  cfg.max_steps = 0;
  cfg.duration = t_push + kPushRecoveryWindow;
  cfg.validate();

  PushGrid grid;
  grid.samples.reserve(static_cast<std::size_t>(n_samples));
  int recovered = 0;
  for (int i = 0; i < n_samples; ++i) {
    const auto [impulse, angle] = push_sample_point(i, n_samples, i_max);
    cfg.pushes = {Push{t_push, impulse, {std::cos(angle), std::sin(angle)}}};
    const bool ok = simulate_episode(cfg).completed();
    recovered += ok ? 1 : 0;
    grid.samples.push_back({impulse, angle, ok});
  }
  grid.success_rate = static_cast<double>(recovered) / n_samples;
  return grid;
}

inline constexpr double kTerrainTrialDuration = 5.0;

/// Seed of trial `k` for a sweep started from `base_seed`.
[[nodiscard]] inline std::uint64_t trial_seed(std::uint64_t base_seed, int k) {
  return base_seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(k + 1);
}

/// Fraction of 5 s episodes completed on rough ground, per roughness level.
/// Trial k uses the same seeds at every level.
[[nodiscard]] inline std::vector<std::pair<double, double>> terrain_success_rate(
    const SimConfig& base, const std::vector<double>& h_max_list, int trials_per_level) {
  if (trials_per_level < 1) throw ConfigInvalid("trials_per_level must be >= 1");
  std::vector<std::pair<double, double>> out;
  out.reserve(h_max_list.size());
  for (double h : h_max_list) {
    int ok = 0;
    for (int k = 0; k < trials_per_level; ++k) {
      SimConfig cfg = base;
      const std::uint64_t seed = trial_seed(base.rng_seed, k);
      cfg.rng_seed = seed;
      cfg.terrain = Terrain::rough(h, seed);
      cfg.max_steps = 0;
      cfg.duration = kTerrainTrialDuration;
      if (simulate_episode(cfg).completed()) ++ok;
    }
    out.emplace_back(h, static_cast<double>(ok) / trials_per_level);
  }
  return out;
}

}  // namespace stride_lab
