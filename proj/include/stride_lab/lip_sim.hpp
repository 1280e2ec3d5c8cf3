#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stride_lab/errors.hpp"
#include "stride_lab/lip_flow.hpp"
#include "stride_lab/model.hpp"
#include "stride_lab/planners.hpp"
#include "stride_lab/terrain.hpp"

namespace stride_lab {

using Rng = std::mt19937_64;

struct ScheduledCommand {
  double t_start = 0.0;
  GaitCommand command;
  friend bool operator==(const ScheduledCommand&, const ScheduledCommand&) = default;
};

/// Instantaneous horizontal impulse on the torso.
struct Push {
  double t = 0.0;
  double impulse = 0.0;  // N*s
  Vec2 direction{1.0, 0.0};
  friend bool operator==(const Push&, const Push&) = default;
};

struct SimConfig {
  BipedParams params;
  PlannerId planner = PlannerId::LS;
  Terrain terrain;
  std::vector<ScheduledCommand> schedule{{0.0, GaitCommand{}}};
  std::vector<Push> pushes;
  /// Step budget; 0 means unlimited (then `duration` must be set).
  int max_steps = 100;
  /// Simulated time budget in seconds; 0 means unlimited.
  double duration = 0.0;
  /// Per-axis std-dev of touchdown placement error, metres.
  double foot_noise_sigma = 0.0;
  /// Per-axis std-dev of a velocity kick applied at every touchdown, m/s.
  double velocity_noise_sigma = 0.0;
  std::uint64_t rng_seed = 1;
  /// Step size of the numerical reference integrator used by tests.
  double integrator_dt = 1e-4;
  double gap_margin = 0.02;
  /// Gap-shift search window; non-positive means l_max.
  double gap_window = 0.0;
  /// Ankle centre-of-pressure regulation inside the support polygon.
  bool balance_layer = true;
  /// Starting state; defaults to the steady gait of the first command.
  std::optional<HybridState> initial_state;

  [[nodiscard]] double effective_gap_window() const {
    return gap_window > 0.0 ? gap_window : params.l_max;
  }

  [[nodiscard]] const GaitCommand& command_at(double t) const {
    const ScheduledCommand* active = &schedule.front();
    for (const auto& sc : schedule) {
      if (sc.t_start <= t + 1e-12) active = &sc;
    }
    return active->command;
  }

  void validate() const {
    params.validate();
    if (schedule.empty()) throw ConfigInvalid("command schedule is empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      if (i > 0 && schedule[i].t_start < schedule[i - 1].t_start)
        throw ConfigInvalid("command schedule not sorted by t_start");
      schedule[i].command.validate(params);
    }
    for (std::size_t i = 0; i < pushes.size(); ++i) {
      const auto& p = pushes[i];
      if (i > 0 && p.t < pushes[i - 1].t) throw ConfigInvalid("pushes not sorted by time");
      if (!(p.impulse >= 0.0)) throw ConfigInvalid("push impulse must be >= 0");
      if (std::abs(p.direction.norm() - 1.0) > 1e-9)
        throw ConfigInvalid("push direction must be a unit vector");
    }
    if (max_steps < 0 || duration < 0) throw ConfigInvalid("negative step or time budget");
    if (max_steps == 0 && duration == 0.0) throw ConfigInvalid("no step or time budget");
    if (foot_noise_sigma < 0 || velocity_noise_sigma < 0)
      throw ConfigInvalid("noise sigma must be >= 0");
  }
};

/// Velocity jump of impulse / mass along `direction`.
[[nodiscard]] inline HybridState apply_push(HybridState state, double impulse,
                                            const Vec2& direction, const BipedParams& params) {
  state.torso.vel += direction * (impulse / params.mass);
  return state;
}

/// Kinematic fall test: CoM beyond leg reach of the stance foot, or a runaway
/// speed.
[[nodiscard]] inline bool detect_fall(const HybridState& state, const BipedParams& params,
                                      double speed_limit = std::numeric_limits<double>::infinity()) {
  return state.com_offset().norm() > params.reach_max || state.torso.vel.norm() > speed_limit;
}

/// Centre-of-pressure offset (relative to the stance foot) chosen by the
/// ankle balance layer for the rest of the current stance.
///
/// Drives the divergent component xi = r + v/omega to the value it has at the
/// end of a stance on the symmetric gait of the current command, using the
/// nominal pendulum constant, and clips the result to the support polygon.
[[nodiscard]] inline Vec2 balance_cop(const Vec2& r, const Vec2& v, double remaining,
                                      Side stance, const GaitCommand& cmd,
                                      const BipedParams& params) {
  const double w = params.omega();
  const double e = std::exp(w * remaining);
  if (!(e - 1.0 > 1e-12)) return {};
  const double T = cmd.step_duration;
  const double E = std::exp(w * T);
  const double gain = E / (E - 1.0);
  const Vec2 xi = r + v / w;
  const Vec2 xi_end{plan_x_step(cmd.vx, T, params.l_max) * gain,
                    -side_sign(stance) * params.w_nom * (1.0 + std::tanh(0.5 * w * T)) +
                        cmd.vy * T * gain};
  Vec2 u = (xi * e - xi_end) / (e - 1.0);
  u.x = std::clamp(u.x, -params.cop_limit.x, params.cop_limit.x);
  u.y = std::clamp(u.y, -params.cop_limit.y, params.cop_limit.y);
  return u;
}

/// State at a touchdown on the symmetric periodic gait of `cmd`: the current
/// stance foot is at x = origin.x (offset w_nom to the side opposite `swing`),
/// the CoM half a step ahead of it, and the `swing` foot about to be placed.
[[nodiscard]] inline HybridState steady_gait_state(const GaitCommand& cmd,
                                                   const BipedParams& params,
                                                   Side swing = Side::Left, Vec2 origin = {}) {
  const double w = params.omega();
  const double T = cmd.step_duration;
  const double step = plan_x_step(cmd.vx, T, params.l_max);
  const double half = 0.5 * step;
  const double c = std::cosh(w * T);
  const double s = std::sinh(w * T);
  HybridState st;
  st.torso.pos = origin + Vec2{half, 0.0};
  st.torso.vel = {half * w * (1.0 + c) / s,
                  side_sign(swing) * w * params.w_nom * std::tanh(0.5 * w * T) + cmd.vy};
  st.stance_foot = origin + Vec2{0.0, -side_sign(swing) * params.w_nom};
  st.swing_side = swing;
  st.stance_duration = T;
  st.phase_time = T;
  const Vec2 avg{step / T, cmd.vy};
  st.step_start_pos = st.torso.pos - avg * T;
  st.prev_step_avg_vel = avg;
  return st;
}

/// Average CoM velocity over the stance that ends at the current touchdown.
[[nodiscard]] inline Vec2 completed_step_avg(const HybridState& st) {
  return (st.torso.pos - st.step_start_pos) / st.stance_duration;
}

/// Hybrid reset at touchdown: the swing foot lands on the plan target (plus
/// optional Gaussian placement error), sides swap and the phase clock
/// restarts. Torso position and velocity are continuous.
[[nodiscard]] inline HybridState step_transition(const HybridState& state, const StepPlan& plan,
                                                 double foot_noise_sigma, Rng& rng,
                                                 std::optional<double> next_stance_duration = {}) {
  HybridState next = state;
  next.stance_foot = plan.target;
  if (foot_noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, foot_noise_sigma);
    next.stance_foot.x += noise(rng);
    next.stance_foot.y += noise(rng);
  }
  next.prev_step_avg_vel = completed_step_avg(state);
  next.swing_side = opposite(state.swing_side);
  next.phase_time = 0.0;
  next.stance_duration = next_stance_duration.value_or(state.stance_duration);
  next.step_start_pos = state.torso.pos;
  next.step_index = state.step_index + 1;
  return next;
}

struct EpisodeResult {
  EpisodeLog log;
  HybridState final_state;
};

namespace detail {

/// Largest |r| over a constant-CoP flow segment, sampled at both ends and at
/// each axis's interior extremum.
inline double max_reach_over_segment(const Vec2& r0, const Vec2& v0, double dt, double omega,
                                     const Vec2& cop) {
  const Vec2 q0 = r0 - cop;
  auto at = [&](double t) {
    return flow_offset(q0, v0, std::cosh(omega * t), std::sinh(omega * t), omega) + cop;
  };
  double best = std::max(r0.norm(), at(dt).norm());
  for (int axis = 0; axis < 2; ++axis) {
    const double a = 0.5 * (q0[axis] + v0[axis] / omega);
    const double b = 0.5 * (q0[axis] - v0[axis] / omega);
    if (a * b > 0.0) {
      const double t_ext = std::log(b / a) / (2.0 * omega);
      if (t_ext > 0.0 && t_ext < dt) best = std::max(best, at(t_ext).norm());
    }
  }
  return best;
}

inline double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return lo + (hi - lo) * u(rng);
}

}  // namespace detail

/// Runs the closed loop until the step/time budget, a fall, or an infeasible
/// foothold. Bitwise deterministic for a fixed config.
[[nodiscard]] inline EpisodeResult run_episode(const SimConfig& cfg) {
  cfg.validate();
  const BipedParams& p = cfg.params;
  const double w_nominal = p.omega();
  Rng rng(cfg.rng_seed);

  double v_cmd_max = 0.0;
  for (const auto& sc : cfg.schedule) v_cmd_max = std::max(v_cmd_max, sc.command.velocity().norm());
  const double speed_limit = 10.0 * std::max(v_cmd_max, 0.5);

  EpisodeResult res;
  HybridState st = cfg.initial_state.value_or(steady_gait_state(cfg.command_at(0.0), p));
  double t = 0.0;
  std::size_t next_push = 0;
  while (next_push < cfg.pushes.size() && cfg.pushes[next_push].t < 0.0) ++next_push;

  for (int k = 0;; ++k) {
    if (cfg.max_steps > 0 && k >= cfg.max_steps) break;
    if (cfg.duration > 0.0 && t >= cfg.duration - 1e-9) break;

    const GaitCommand& cmd = cfg.command_at(t);
    const Vec2 v_avg = completed_step_avg(st);
    StepPlan plan = plan_step(cfg.planner, PlannerInput{st, cmd, v_avg, &cfg.terrain}, p);
    if (cfg.terrain.kind() == Terrain::Kind::Gapped) {
      try {
        plan = adjust_for_gap(plan, cfg.terrain, cfg.gap_margin, cfg.effective_gap_window());
      } catch (const InfeasibleStep& e) {
        res.log.status = {TerminalKind::Infeasible, k, e.what()};
        break;
      }
    }
    st = step_transition(st, plan, cfg.foot_noise_sigma, rng, cmd.step_duration);
    st.step_index = k;

    StepRecord rec;
    rec.step_index = k;
    rec.t_touchdown = t;
    rec.stance_duration = cmd.step_duration;
    rec.v_desired = cmd.velocity();
    rec.plan = plan;
    rec.executed_foot = st.stance_foot;

    double omega = w_nominal;
    if (cfg.terrain.kind() == Terrain::Kind::Rough) {
      const double h = cfg.terrain.height(st.stance_foot.x);
      omega = std::sqrt(p.gravity / (p.com_height - h));
      const double kick = cfg.terrain.h_max() * w_nominal;
      st.torso.vel.x += detail::uniform(rng, -kick, kick);
      st.torso.vel.y += detail::uniform(rng, -kick, kick);
    }
    if (cfg.velocity_noise_sigma > 0.0) {
      std::normal_distribution<double> noise(0.0, cfg.velocity_noise_sigma);
      st.torso.vel.x += noise(rng);
      st.torso.vel.y += noise(rng);
    }

    bool fell = !cfg.terrain.solid(st.stance_foot.x) || detect_fall(st, p, speed_limit);
    const double T = cmd.step_duration;
    double tau = 0.0;
    while (!fell && tau < T) {
      double seg_end = T;
      const bool push_due = next_push < cfg.pushes.size() && cfg.pushes[next_push].t < t + T;
      if (push_due) seg_end = std::clamp(cfg.pushes[next_push].t - t, tau, T);

      const Vec2 r = st.com_offset();
      const Vec2 cop = cfg.balance_layer
                           ? balance_cop(r, st.torso.vel, T - tau, st.stance_side(), cmd, p)
                           : Vec2{};
      const double dt = seg_end - tau;
      if (dt > 0.0) {
        if (detail::max_reach_over_segment(r, st.torso.vel, dt, omega, cop) > p.reach_max) {
          fell = true;
        }
        const auto flow = stance_flow(r, st.torso.vel, dt, omega, p.mass, cop);
        st.torso.pos = st.stance_foot + flow.r_end;
        st.torso.vel = flow.v_end;
        rec.positive_work += flow.positive_work;
      }
      tau = seg_end;
      st.phase_time = tau;
      if (push_due) {
        const auto& push = cfg.pushes[next_push++];
        st = apply_push(st, push.impulse, push.direction, p);
      }
      if (detect_fall(st, p, speed_limit)) fell = true;
    }
    t += T;
    rec.v_step_avg = (st.torso.pos - st.step_start_pos) / T;
    rec.fell = fell;
    res.log.steps.push_back(rec);
    if (fell) {
      res.log.status = {TerminalKind::Fell, k, "fall during stance"};
      break;
    }
  }
  res.final_state = st;
  return res;
}

[[nodiscard]] inline EpisodeLog simulate_episode(const SimConfig& cfg) {
  return run_episode(cfg).log;
}

/// Jacobian of the stride map (two touchdowns, returning to the same swing
/// side) at its fixed point.
///
/// Per axis the state is (r, v, vbar, vbar_prev): CoM offset from the stance
/// foot and CoM velocity at touchdown, and the average velocities of the two
/// most recent stances that the Raibert term feeds back. Axes are decoupled,
/// so each axis gets its own 4x4 block.
struct StepMapLinearization {
  using Block = std::array<std::array<double, 4>, 4>;
  std::array<Block, 2> jacobian{};
  /// Per-step spectral radius (square root of the stride map's).
  double spectral_radius = 0.0;
  std::array<double, 2> axis_spectral_radius{};
  std::array<double, 8> fixed_point{};
  /// Largest magnitude of a cross-axis Jacobian entry.
  double cross_coupling = 0.0;
};

namespace detail {

inline HybridState state_from_vector(const std::array<double, 8>& z, double T) {
  HybridState st;
  st.stance_foot = {};
  st.torso.pos = {z[0], z[1]};
  st.torso.vel = {z[2], z[3]};
  st.step_start_pos = st.torso.pos - Vec2{z[4], z[5]} * T;
  st.prev_step_avg_vel = {z[6], z[7]};
  st.swing_side = Side::Left;
  st.stance_duration = T;
  st.phase_time = T;
  return st;
}

inline std::array<double, 8> vector_from_state(const HybridState& st) {
  const Vec2 r = st.com_offset();
  const Vec2 vbar = completed_step_avg(st);
  return {r.x, r.y, st.torso.vel.x, st.torso.vel.y, vbar.x, vbar.y,
          st.prev_step_avg_vel.x, st.prev_step_avg_vel.y};
}

inline double spectral_radius(const Eigen::MatrixXd& m) {
  const Eigen::VectorXcd ev = m.eigenvalues();
  double rho = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) rho = std::max(rho, std::abs(ev[i]));
  return rho;
}

}  // namespace detail

/// Linearizes the closed-loop stride map on flat ground by central finite
/// differences. `balance_layer = false` gives the bare pendulum.
[[nodiscard]] inline StepMapLinearization linearized_step_map(PlannerId planner, Vec2 v_desired,
                                                              const BipedParams& params,
                                                              double td,
                                                              bool balance_layer = true,
                                                              double h = 1e-6) {
  if (!(td >= params.td_min && td <= params.td_max))
    throw ValidationError("step_duration", "outside [td_min, td_max]");
  SimConfig cfg;
  cfg.params = params;
  cfg.planner = planner;
  cfg.schedule = {{0.0, GaitCommand{v_desired.x, v_desired.y, td}}};
  cfg.max_steps = 2;
  cfg.balance_layer = balance_layer;

  auto stride = [&](const std::array<double, 8>& z) {
    SimConfig c = cfg;
    c.initial_state = detail::state_from_vector(z, td);
    auto res = run_episode(c);
    return detail::vector_from_state(res.final_state);
  };

  std::array<double, 8> z = detail::vector_from_state(steady_gait_state(cfg.schedule[0].command, params));
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const auto next = stride(z);
    double delta = 0.0;
    for (int i = 0; i < 8; ++i) {
      if (!std::isfinite(next[i])) throw NoFixedPoint("stride map diverged");
      delta = std::max(delta, std::abs(next[i] - z[i]));
    }
    z = next;
    if (delta < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NoFixedPoint("fixed-point iteration did not converge in 200 strides");

  Eigen::MatrixXd J(8, 8);
  for (int j = 0; j < 8; ++j) {
    auto zp = z;
    auto zm = z;
    zp[j] += h;
    zm[j] -= h;
    const auto fp = stride(zp);
    const auto fm = stride(zm);
    for (int i = 0; i < 8; ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }

  StepMapLinearization out;
  out.fixed_point = z;
  // State layout interleaves axes: index 2*k + axis.
  for (int axis = 0; axis < 2; ++axis) {
    Eigen::MatrixXd block(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        block(i, j) = J(2 * i + axis, 2 * j + axis);
        out.jacobian[axis][i][j] = block(i, j);
      }
    }
    out.axis_spectral_radius[axis] = std::sqrt(detail::spectral_radius(block));
  }
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (i % 2 != j % 2) out.cross_coupling = std::max(out.cross_coupling, std::abs(J(i, j)));
    }
  }
  out.spectral_radius = std::sqrt(detail::spectral_radius(J));
  return out;
}

}  // namespace stride_lab
