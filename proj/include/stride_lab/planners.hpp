#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "stride_lab/errors.hpp"
#include "stride_lab/lip_flow.hpp"
#include "stride_lab/model.hpp"
#include "stride_lab/terrain.hpp"

namespace stride_lab {

/// Everything a footstep planner sees at a touchdown.
struct PlannerInput {
  HybridState state;
  GaitCommand command;
  /// Average torso velocity over the step just completed.
  Vec2 step_avg_vel;
  const Terrain* terrain = nullptr;
};

/// Forward step length: commanded velocity times step duration, saturated at
/// +/- l_max.
[[nodiscard]] inline double plan_x_step(double vx, double td, double l_max) {
  const double step = vx * td;
  if (step >= l_max) return l_max;
  if (step <= -l_max) return -l_max;
  return step;
}

/// Lateral step. A left swing may follow a leftward (or zero) command, a right
/// swing a rightward (or zero) one; the other foot steps back towards the
/// centreline by w_min.
[[nodiscard]] inline double plan_y_step(double vy, double td, Side swing, double w_min) {
  const bool follows = (vy >= 0.0 && swing == Side::Left) || (vy <= 0.0 && swing == Side::Right);
  if (follows) return vy * td;
  const double sign = (vy > 0.0) ? 1.0 : (vy < 0.0 ? -1.0 : 0.0);
  return -sign * w_min;
}

/// Raibert-style velocity regulator: Kp (v_a - v_d) + Kd (v_a - v_prev), per axis.
[[nodiscard]] inline Vec2 raibert_offset(const Vec2& v_actual, const Vec2& v_desired,
                                         const Vec2& v_prev, const Vec2& kp, const Vec2& kd) {
  return {kp.x * (v_actual.x - v_desired.x) + kd.x * (v_actual.x - v_prev.x),
          kp.y * (v_actual.y - v_desired.y) + kd.y * (v_actual.y - v_prev.y)};
}

/// Linear Step planner.
///
/// The foot is placed half a step length ahead of the torso (the neutral
/// point of a symmetric gait, so consecutive footholds end up x_step apart)
/// and w_nom to the swing side of the torso, then shifted by y_step and by the
/// Raibert offset computed from step-average velocities.
[[nodiscard]] inline StepPlan plan_step_ls(const PlannerInput& in, const BipedParams& params) {
  const auto& cmd = in.command;
  const Side swing = in.state.swing_side;
  StepPlan plan;
  plan.planner = PlannerId::LS;
  plan.heuristic = {plan_x_step(cmd.vx, cmd.step_duration, params.l_max),
                    plan_y_step(cmd.vy, cmd.step_duration, swing, params.w_min)};
  plan.base = in.state.torso.pos + Vec2{0.0, side_sign(swing) * params.w_nom};
  plan.nominal = {0.5 * plan.heuristic.x, plan.heuristic.y};
  plan.raibert_offset = raibert_offset(in.step_avg_vel, cmd.velocity(),
                                       in.state.prev_step_avg_vel, params.kp, params.kd);
  plan.target = plan.composed();
  return plan;
}

/// Dead-beat pendulum planner.
///
/// Predicts the CoM state at the upcoming touchdown on ideal pendulum dynamics
/// and places the foot so that the CoM velocity at the end of the following
/// stance equals the desired one: v_d forward, and laterally the end velocity
/// of the +/- w_nom sway plus v_y. Forward placement is saturated at l_max from
/// the current stance foot.
[[nodiscard]] inline StepPlan plan_step_lipm(const PlannerInput& in, const BipedParams& params) {
  const auto& cmd = in.command;
  const auto& st = in.state;
  const double w = params.omega();
  const double T = cmd.step_duration;
  if (!(w * T >= 1e-6)) throw DegenerateStepDuration("omega * step_duration below 1e-6");

  const double remaining = std::max(0.0, st.stance_duration - st.phase_time);
  const auto predicted = stance_flow(st.com_offset(), st.torso.vel, remaining, params);
  const Vec2 com_td = st.stance_foot + predicted.r_end;
  const Vec2 v_td = predicted.v_end;

  const double c = std::cosh(w * T);
  const double s = std::sinh(w * T);
  const double sway = -side_sign(st.swing_side) * w * params.w_nom * std::tanh(0.5 * w * T);
  const Vec2 v_end_desired{cmd.vx, sway + cmd.vy};
  const Vec2 r_next = (v_end_desired - v_td * c) / (w * s);

  StepPlan plan;
  plan.planner = PlannerId::LIPM;
  plan.heuristic = r_next;
  plan.base = com_td;
  plan.nominal = -r_next;
  const double reach = com_td.x - r_next.x - st.stance_foot.x;
  if (reach > params.l_max) {
    plan.nominal.x = st.stance_foot.x + params.l_max - com_td.x;
  } else if (reach < -params.l_max) {
    plan.nominal.x = st.stance_foot.x - params.l_max - com_td.x;
  }
  plan.target = plan.composed();
  return plan;
}

[[nodiscard]] inline StepPlan plan_step(PlannerId id, const PlannerInput& in,
                                        const BipedParams& params) {
  return id == PlannerId::LS ? plan_step_ls(in, params) : plan_step_lipm(in, params);
}

/// Moves a target off gaps onto the nearest point with `margin` clearance on
/// both sides, searching at most `window` either way; ties go forward.
[[nodiscard]] inline StepPlan adjust_for_gap(StepPlan plan, const Terrain& terrain, double margin,
                                             double window) {
  if (!(margin >= 0.0)) throw ConfigInvalid("gap margin must be >= 0");
  if (!(window > 0.0)) throw ConfigInvalid("gap window must be > 0");

  // Open intervals (begin - margin, end + margin) where no foot may land.
  std::vector<GapInterval> zones;
  for (const auto& g : terrain.gaps()) {
    GapInterval z{g.begin - margin, g.end + margin};
    if (!zones.empty() && z.begin < zones.back().end) {
      zones.back().end = std::max(zones.back().end, z.end);
    } else {
      zones.push_back(z);
    }
  }
  auto blocked = [&](double x) {
    return std::any_of(zones.begin(), zones.end(),
                       [x](const GapInterval& z) { return x > z.begin && x < z.end; });
  };

  const double x = plan.target.x;
  const auto hit = std::find_if(zones.begin(), zones.end(),
                                [x](const GapInterval& z) { return x > z.begin && x < z.end; });
  if (hit == zones.end()) return plan;

  const double back = x - hit->begin;
  const double fwd = hit->end - x;
  // Distances equal up to rounding count as a tie.
  const bool go_forward = fwd <= back + 1e-9;
  const double shift = go_forward ? fwd : back;
  if (shift > window) {
    throw InfeasibleStep("no solid foothold within " + std::to_string(window) + " m of x = " +
                         std::to_string(x));
  }
  const double edge = go_forward ? hit->end : hit->begin;
  const double unshifted = x - plan.gap_shift;
  plan.gap_shift = edge - unshifted;
  plan.target.x = unshifted + plan.gap_shift;
  // The sum may land one ulp inside the zone; walk it out.
  const double outward = go_forward ? INFINITY : -INFINITY;
  for (int i = 0; i < 8 && blocked(plan.target.x); ++i) {
    plan.gap_shift = std::nextafter(plan.gap_shift, outward);
    plan.target.x = unshifted + plan.gap_shift;
  }
  return plan;
}

}  // namespace stride_lab
