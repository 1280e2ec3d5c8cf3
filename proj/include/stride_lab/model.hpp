#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stride_lab/errors.hpp"
#include "stride_lab/vec2.hpp"

namespace stride_lab {

enum class Side { Left, Right };

/// +1 for the left side, -1 for the right side.
[[nodiscard]] constexpr double side_sign(Side s) { return s == Side::Left ? 1.0 : -1.0; }
[[nodiscard]] constexpr Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

enum class PlannerId { LS, LIPM };

[[nodiscard]] inline std::string_view to_string(PlannerId id) {
  return id == PlannerId::LS ? "ls" : "lipm";
}

/// Physical and planner constants of the reduced-order biped.
///
/// Lengths in metres, times in seconds. Gains are per axis (x, y) and map a
/// velocity error in m/s to a foot-placement offset in metres.
struct BipedParams {
  double mass = 4.8;
  double com_height = 0.34;
  double gravity = 9.81;
  double l_max = 0.30;
  double w_min = 0.03;
  double w_nom = 0.05;
  double reach_max = 0.25;
  Vec2 kp{0.3, 0.3};
  Vec2 kd{0.1, 0.1};
  double td_min = 0.20;
  double td_max = 0.40;
  /// Half-extent of the support polygon around the stance foot that the
  /// balance layer may move the centre of pressure within.
  Vec2 cop_limit{0.03, 0.02};

  /// Natural frequency of the pendulum, sqrt(g / z0).
  [[nodiscard]] double omega() const { return std::sqrt(gravity / com_height); }

  /// Throws ValidationError naming the first violated constraint.
  void validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
      if (!ok) throw ValidationError(field, what);
    };
    require(std::isfinite(mass) && mass > 0, "mass", "must be > 0");
    require(std::isfinite(com_height) && com_height > 0, "com_height", "must be > 0");
    require(std::isfinite(gravity) && gravity > 0, "gravity", "must be > 0");
    require(w_min > 0, "w_min", "must be > 0");
    require(w_min <= w_nom, "w_nom", "must be >= w_min");
    require(w_nom < reach_max, "reach_max", "must exceed w_nom");
    require(l_max > 0, "l_max", "must be > 0");
    require(l_max <= 2 * reach_max, "l_max", "must be <= 2 * reach_max");
    require(td_min > 0, "td_min", "must be > 0");
    require(td_min <= td_max, "td_max", "must be >= td_min");
    require(kp.finite() && kd.finite(), "kp", "gains must be finite");
    require(cop_limit.x >= 0 && cop_limit.y >= 0, "cop_limit", "must be >= 0");
  }

  friend bool operator==(const BipedParams&, const BipedParams&) = default;
};

[[nodiscard]] inline BipedParams default_params() { return BipedParams{}; }

/// Orbital energy per unit mass of the pendulum flow, 0.5 * (v^2 - omega^2 r^2).
[[nodiscard]] inline double orbital_energy(double r, double v, const BipedParams& params) {
  const double w = params.omega();
  return 0.5 * (v * v - w * w * r * r);
}

struct GaitCommand {
  double vx = 0.0;
  double vy = 0.0;
  double step_duration = 0.25;

  [[nodiscard]] Vec2 velocity() const { return {vx, vy}; }

  void validate(const BipedParams& params) const {
    if (!std::isfinite(vx)) throw ValidationError("vx", "must be finite");
    if (!std::isfinite(vy)) throw ValidationError("vy", "must be finite");
    if (!(step_duration >= params.td_min))
      throw ValidationError("step_duration", "below td_min = " + std::to_string(params.td_min));
    if (!(step_duration <= params.td_max))
      throw ValidationError("step_duration", "above td_max = " + std::to_string(params.td_max));
  }

  friend bool operator==(const GaitCommand&, const GaitCommand&) = default;
};

struct TorsoState {
  Vec2 pos;
  Vec2 vel;
};

/// Simulator state between touchdowns.
///
/// `stance_foot` is the support point; `swing_side` is the foot that will be
/// placed next. `step_start_pos` is the CoM position at the last touchdown and
/// together with `stance_duration` yields the step-average velocity.
struct HybridState {
  TorsoState torso;
  Vec2 stance_foot;
  Side swing_side = Side::Left;
  double phase_time = 0.0;
  double stance_duration = 0.25;
  int step_index = 0;
  Vec2 step_start_pos;
  Vec2 prev_step_avg_vel;

  [[nodiscard]] Vec2 com_offset() const { return torso.pos - stance_foot; }
  [[nodiscard]] Side stance_side() const { return opposite(swing_side); }
};

/// A planned touchdown target and the terms it was assembled from.
///
/// target == base + nominal + raibert_offset + (gap_shift, 0), evaluated in
/// exactly that order. `heuristic` holds the raw planner output (x_step,
/// y_step for LS; the stance-relative pendulum offset for LIPM).
struct StepPlan {
  Vec2 target;
  Vec2 base;
  Vec2 nominal;
  Vec2 heuristic;
  Vec2 raibert_offset;
  double gap_shift = 0.0;
  PlannerId planner = PlannerId::LS;

  [[nodiscard]] Vec2 composed() const {
    Vec2 t = base + nominal + raibert_offset;
    t.x += gap_shift;
    return t;
  }
};

struct StepRecord {
  int step_index = 0;
  double t_touchdown = 0.0;
  double stance_duration = 0.0;
  Vec2 v_desired;
  /// Net CoM displacement over this stance divided by its duration.
  Vec2 v_step_avg;
  StepPlan plan;
  Vec2 executed_foot;
  double positive_work = 0.0;
  bool fell = false;
};

enum class TerminalKind { Completed, Fell, Infeasible };

struct TerminalStatus {
  TerminalKind kind = TerminalKind::Completed;
  int step_index = -1;
  std::string detail;
};

struct EpisodeLog {
  std::vector<StepRecord> steps;
  TerminalStatus status;

  [[nodiscard]] bool completed() const { return status.kind == TerminalKind::Completed; }
};

}  // namespace stride_lab
