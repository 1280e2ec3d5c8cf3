// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stride_lab/bench/cli.hpp"
#include "stride_lab/stride_lab.hpp"

using namespace stride_lab;
using namespace stride_lab::bench;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += "[violated] ";
    }
    detail += what + "; ";
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

SimConfig walking(PlannerId planner, double vx, double td, int steps) {
  SimConfig c;
  c.planner = planner;
  c.schedule = {{0.0, GaitCommand{vx, 0.0, td}}};
  c.max_steps = steps;
  return c;
}

oracle::PendulumState pendulum(Vec2 r, Vec2 v) { return {r.x, r.y, v.x, v.y}; }

Outcome a1() {
  Outcome o;
  const auto log = simulate_episode(walking(PlannerId::LS, 0.5, 0.25, 120));
  o.check(log.completed(), "episode completed");
  double worst = 0.0;
  for (std::size_t k = 20; k < log.steps.size(); ++k)
    worst = std::max(worst, std::abs(log.steps[k].v_step_avg.x - 0.5));
  o.check(worst <= 1e-6, fmt("max |vbar - 0.5| after warm-up = %.3g (tol 1e-6)", worst));
  const auto stats = velocity_tracking_stats(log, Axis::X, {20, 120});
  o.check(stats.mae < 1e-6, fmt("mae steps 20-119 = %.3g (tol 1e-6)", stats.mae));
  return o;
}

Outcome a2() {
  Outcome o;
  const BipedParams p;
  for (double v : {0.0, 0.5}) {
    const auto lin = linearized_step_map(PlannerId::LS, {v, 0.0}, p, 0.25);
    o.check(lin.spectral_radius < 1.0,
            fmt("LS v_d=%.1f spectral radius %.4f < 1", v, lin.spectral_radius));
  }
  return o;
}

Outcome a3() {
  Outcome o;
  const BipedParams p;
  const double w = p.omega();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> r(-0.06, 0.06), v(-0.6, 0.6), cmd(-0.6, 0.6),
      T(0.2, 0.4), phase(0.0, 1.0);
  int tested = 0;
  double worst = 0.0;
  while (tested < 20) {
    HybridState st;
    st.swing_side = rng() % 2 ? Side::Left : Side::Right;
    st.stance_foot = {0.0, -side_sign(st.swing_side) * p.w_nom};
    st.torso.pos = st.stance_foot + Vec2{r(rng), r(rng)};
    st.torso.vel = {v(rng), v(rng)};
    const GaitCommand gc{cmd(rng), 0.5 * cmd(rng), T(rng)};
    st.stance_duration = gc.step_duration;
    st.phase_time = phase(rng) * gc.step_duration;
    const auto plan = plan_step_lipm({st, gc, {}, nullptr}, p);
    if (std::abs(plan.target.x - st.stance_foot.x) >= p.l_max) continue;  // saturated
    const Vec2 r0 = st.com_offset();
    const auto td = oracle::rk4_pendulum(pendulum(r0, st.torso.vel),
                                         st.stance_duration - st.phase_time, w, p.mass);
    const Vec2 com_td = st.stance_foot + Vec2{td.rx, td.ry};
    const auto end = oracle::rk4_pendulum(pendulum(com_td - plan.target, {td.vx, td.vy}),
                                          gc.step_duration, w, p.mass);
    const double sway =
        -side_sign(st.swing_side) * w * p.w_nom * std::tanh(0.5 * w * gc.step_duration);
    worst = std::max({worst, std::abs(end.vx - gc.vx), std::abs(end.vy - (sway + gc.vy))});
    ++tested;
  }
  o.check(worst <= 1e-9, fmt("20 random states, max |v(T) - v_d| = %.3g (tol 1e-9)", worst));
  return o;
}

Outcome a4() {
  Outcome o;
  double mae[2] = {0, 0};
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    for (int k = 0; k < 2; ++k) {
      SimConfig c = walking(k == 0 ? PlannerId::LS : PlannerId::LIPM, 0.5, 0.25, 100);
      c.velocity_noise_sigma = 0.05;
      c.rng_seed = trial_seed(1000, rep);
      const auto log = simulate_episode(c);
      if (!log.completed()) {
        o.check(false, "episode fell (planner " + std::to_string(k) + ")");
        return o;
      }
      mae[k] += velocity_tracking_stats(log, Axis::X, {20, 100}).mae / reps;
    }
  }
  o.check(mae[0] < mae[1], fmt("mean MAE LS %.4f < LIPM %.4f", mae[0], mae[1]));
  return o;
}

/// CoM offset from the stance foot at the push instant of the unpushed gait.
double offset_at_push(const SimConfig& base) {
  SimConfig c = base;
  const double t_push = push_time(c);
  const double T = c.command_at(0.0).step_duration;
  c.max_steps = kPushStartStep;
  c.duration = 0.0;
  auto run = run_episode(c);
  HybridState st = run.final_state;
  const auto& cmd = c.command_at(t_push);
  const auto plan = plan_step(c.planner, {st, cmd, completed_step_avg(st), nullptr}, c.params);
  Rng rng(0);
  st = step_transition(st, plan, 0.0, rng, T);
  const double dt = t_push - kPushStartStep * T;
  const Vec2 cop = balance_cop(st.com_offset(), st.torso.vel, T, st.stance_side(), cmd, c.params);
  const auto flow = stance_flow(st.com_offset(), st.torso.vel, dt, c.params.omega(), c.params.mass,
                                cop);
  return flow.r_end.norm();
}

Outcome a5() {
  Outcome o;
  for (PlannerId id : {PlannerId::LS, PlannerId::LIPM}) {
    SimConfig base = walking(id, 0.0, 0.25, 0);
    const std::string name(to_string(id));
    const double r5 = push_recovery_grid(base, 5.0, 500).success_rate;
    const double r7 = push_recovery_grid(base, 7.0, 500).success_rate;
    o.check(r5 >= r7, name + fmt(" rate(5 Ns) %.3f >= rate(7 Ns) %.3f", r5, r7));
    const double r_push = offset_at_push(base);
    const double i_star = base.params.mass * base.params.omega() * (base.params.reach_max - r_push);
    const double i_below = i_star - 1e-3;
    const auto grid = push_recovery_grid(base, i_below, 500);
    double first_fail = 0.0;
    for (const auto& s : grid.samples) {
      if (!s.recovered && (first_fail == 0.0 || s.impulse < first_fail)) first_fail = s.impulse;
    }
    std::string msg = name + fmt(" capturability threshold %.3f Ns (|r| at push %.4f m)", i_star,
                                 r_push) +
                      fmt(", rate at i_max=%.3f is %.3f", i_below, grid.success_rate);
    if (first_fail > 0.0) msg += fmt(", smallest failing impulse %.3f Ns", first_fail);
    o.check(grid.success_rate == 1.0, msg);
  }
  return o;
}

Outcome a6() {
  Outcome o;
  const std::vector<double> h = {0.0, 0.005, 0.01, 0.02, 0.03};
  SimConfig fb = walking(PlannerId::LS, 0.5, 0.25, 0);
  SimConfig open = fb;
  open.params.kp = {0.0, 0.0};
  open.params.kd = {0.0, 0.0};
  const auto with = terrain_success_rate(fb, h, 100);
  const auto without = terrain_success_rate(open, h, 100);
  std::string rates = "rates (gains / open loop):";
  bool monotone = true, dominates = true, strict = false;
  for (std::size_t i = 0; i < h.size(); ++i) {
    rates += fmt(" %.3g", with[i].second, 0) + fmt("/%.3g", without[i].second);
    if (i > 0) monotone = monotone && with[i].second <= with[i - 1].second &&
                          without[i].second <= without[i - 1].second;
    dominates = dominates && with[i].second >= without[i].second;
    strict = strict || with[i].second > without[i].second;
  }
  o.detail = rates + "; ";
  o.check(monotone, "success non-increasing in h_max");
  o.check(dominates, "gains >= open loop at every level");
  o.check(strict, "gains > open loop at some level");
  return o;
}

Outcome a7() {
  Outcome o;
  const auto cfg = preset(ScenarioKind::Gaps);
  const auto res = execute_scenario(cfg);
  o.check(res.log.completed() && res.exit_code == 0, "gaps preset completed, exit 0");
  const double a = cfg.terrain.gaps.front().begin - cfg.terrain.gap_margin;
  const double b = cfg.terrain.gaps.front().end + cfg.terrain.gap_margin;
  int inside = 0;
  // A foot exactly on the clearance edge has the full margin and is allowed.
  for (const auto& s : res.log.steps) inside += s.executed_foot.x > a && s.executed_foot.x < b;
  o.check(inside == 0, "footfalls inside gap+margin: " + std::to_string(inside));

  ScenarioConfig wide = cfg;
  wide.terrain.gaps = {{1.0, 1.8}};
  const auto res_w = execute_scenario(wide);
  o.check(res_w.log.status.kind != TerminalKind::Completed && res_w.exit_code != 0,
          "0.8 m gap ends " + std::string(to_string(res_w.log.status.kind)) + ", exit " +
              std::to_string(res_w.exit_code));
  return o;
}

Outcome a8() {
  Outcome o;
  for (double T : {0.20, 0.25, 0.30, 0.35, 0.40}) {
    const auto log = simulate_episode(walking(PlannerId::LS, 0.4, T, 100));
    std::string msg = fmt("T=%.2f", T);
    if (log.completed()) msg += fmt(" mae %.3g", velocity_tracking_stats(log, Axis::X, {20, 100}).mae);
    o.check(log.completed(), msg + (log.completed() ? "" : " fell"));
  }
  return o;
}

Outcome a9() {
  Outcome o;
  const BipedParams p;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> r(-0.15, 0.15), v(-1.0, 1.0), t(0.0, 0.4);
  double e_err = 0.0, semi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2 r0{r(rng), r(rng)}, v0{v(rng), v(rng)};
    const double t1 = t(rng), t2 = t(rng);
    const auto f = stance_flow(r0, v0, t1 + t2, p);
    for (int a = 0; a < 2; ++a) {
      const double e0 = orbital_energy(r0[a], v0[a], p);
      const double e1 = orbital_energy(f.r_end[a], f.v_end[a], p);
      const double scale = 0.5 * (v0[a] * v0[a] + p.omega() * p.omega() * r0[a] * r0[a]);
      if (scale > 1e-12) e_err = std::max(e_err, std::abs(e1 - e0) / scale);
    }
    const auto g1 = stance_flow(r0, v0, t1, p);
    const auto g2 = stance_flow(g1.r_end, g1.v_end, t2, p);
    semi = std::max({semi, (g2.r_end - f.r_end).norm(), (g2.v_end - f.v_end).norm()});
  }
  o.check(e_err <= 1e-9, fmt("orbital energy relative drift %.3g (tol 1e-9)", e_err));
  o.check(semi <= 1e-10, fmt("semigroup error %.3g (tol 1e-10)", semi));

  HybridState st = steady_gait_state({0.5, 0.0, 0.25}, p);
  StepPlan plan;
  plan.target = {1.125, 0.05};
  Rng r0(1);
  const auto next = step_transition(st, plan, 0.0, r0);
  o.check(next.torso.pos == st.torso.pos && next.torso.vel == st.torso.vel &&
              next.stance_foot == plan.target,
          "step_transition continuity exact");

  ScenarioConfig cfg = preset(ScenarioKind::StepTrack);
  cfg.velocity_noise_sigma = 0.02;
  const auto x = execute_scenario(cfg);
  const auto y = execute_scenario(cfg);
  bool same = x.artifacts == y.artifacts && x.log.steps.size() == y.log.steps.size();
  for (std::size_t i = 0; same && i < x.log.steps.size(); ++i) {
    const auto &a = x.log.steps[i], &b = y.log.steps[i];
    same = a.v_step_avg == b.v_step_avg && a.executed_foot == b.executed_foot &&
           a.plan.target == b.plan.target && a.positive_work == b.positive_work;
  }
  o.check(same, "repeated seeded runs bit-identical (log, CSV, SVG)");
  return o;
}

Outcome a10() {
  Outcome o;
  const BipedParams p;
  o.check(plan_x_step(0.5, 0.25, 0.30) == 0.125 && plan_x_step(2.0, 0.25, 0.30) == 0.30 &&
              plan_x_step(-2.0, 0.25, 0.30) == -0.30,
          "plan_x_step examples");
  o.check(plan_y_step(0.2, 0.25, Side::Left, 0.03) == 0.05 &&
              plan_y_step(0.2, 0.25, Side::Right, 0.03) == -0.03 &&
              plan_y_step(0.0, 0.25, Side::Left, 0.03) == 0.0,
          "plan_y_step examples");
  const Vec2 ro = raibert_offset({0.4, 0}, {0.5, 0}, {0.45, 0}, {0.3, 0.3}, {0.1, 0.1});
  const Vec2 ro2 = raibert_offset({0.6, 0.1}, {0.5, 0}, {0.5, 0.1}, {0.3, 0.3}, {0.1, 0.1});
  const Vec2 ro0 = raibert_offset({0.3, 0.2}, {0.3, 0.2}, {0.3, 0.2}, {0.3, 0.3}, {0.1, 0.1});
  o.check(std::abs(ro.x + 0.035) < 1e-15 && ro.y == 0.0 && std::abs(ro2.x - 0.04) < 1e-15 &&
              std::abs(ro2.y - 0.03) < 1e-15 && ro0 == Vec2{},
          "raibert_offset examples");

  StepPlan plan;
  plan.target = {0.5, 0.05};
  const auto flat = adjust_for_gap(plan, Terrain::flat(), 0.02, 0.30);
  const auto gap = Terrain::gapped({{1.0, 1.25}});
  plan.target.x = 1.05;
  const auto moved = adjust_for_gap(plan, gap, 0.02, 0.30);
  bool infeasible = false;
  try {
    (void)adjust_for_gap(plan, Terrain::gapped({{0.0, 10.0}}), 0.02, 0.30);
  } catch (const InfeasibleStep&) {
    infeasible = true;
  }
  o.check(flat.target.x == 0.5 && flat.gap_shift == 0.0 && std::abs(moved.target.x - 0.98) < 1e-12 &&
              std::abs(moved.gap_shift + 0.07) < 1e-12 && infeasible,
          "adjust_for_gap examples");

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> vel(-3, 3), td(0.2, 0.4), x(-1, 3);
  bool clamp = true, odd = true, lin = true, idem = true;
  for (int i = 0; i < 10000; ++i) {
    const double a = vel(rng), b = vel(rng), t = td(rng);
    clamp = clamp && std::abs(plan_x_step(a, t, p.l_max)) <= p.l_max;
    odd = odd && plan_x_step(-a, t, p.l_max) == -plan_x_step(a, t, p.l_max);
    const Vec2 va{a, b}, vd{vel(rng), vel(rng)}, vp{vel(rng), vel(rng)};
    const Vec2 s1 = raibert_offset(va * 2.0, vd * 2.0, vp * 2.0, p.kp, p.kd);
    const Vec2 s0 = raibert_offset(va, vd, vp, p.kp, p.kd);
    lin = lin && (s1 - s0 * 2.0).norm() < 1e-12;
    StepPlan q;
    q.target = {x(rng), 0.05};
    try {
      const auto once = adjust_for_gap(q, gap, 0.02, 0.30);
      const auto twice = adjust_for_gap(once, gap, 0.02, 0.30);
      idem = idem && twice.target == once.target;
    } catch (const InfeasibleStep&) {
    }
  }
  o.check(clamp && odd, "x-step clamp and oddness on 1e4 inputs");
  o.check(lin, "Raibert linearity on 1e4 inputs");
  o.check(idem, "gap adjustment idempotent on 1e4 inputs");
  return o;
}

Outcome a11() {
  Outcome o;
  const BipedParams p;
  double cot[2];
  for (int k = 0; k < 2; ++k) {
    const auto c = walking(k == 0 ? PlannerId::LS : PlannerId::LIPM, 0.6, 0.25, 100);
    const double x = cost_of_transport(simulate_episode(c), p).mechanical_cot;
    const double y = cost_of_transport(simulate_episode(c), p).mechanical_cot;
    o.check(x > 0.0 && x == y, fmt(k == 0 ? "LS CoT %.5f" : "LIPM CoT %.5f", x));
    cot[k] = x;
  }
  o.detail += cot[0] < cot[1] ? "ordering ls<lipm (reported only); "
                              : "ordering ls>=lipm (reported only); ";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {"A1", 1, a1},  {"A2", 1, a2},   {"A3", 5, a3},   {"A4", 30, a4},
      {"A5", 60, a5}, {"A6", 120, a6}, {"A7", 5, a7},   {"A8", 10, a8},
      {"A9", 5, a9},  {"A10", 5, a10}, {"A11", 10, a11}};
  int failures = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail += std::string("exception: ") + e.what() + "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt("[violated] runtime over %.0f s budget; ", c.budget_s);
    }
    failures += o.pass ? 0 : 1;
    std::printf("%-3s %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
  return failures == 0 ? 0 : 1;
}
