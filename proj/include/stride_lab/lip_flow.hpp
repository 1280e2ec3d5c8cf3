#pragma once

#include <algorithm>
#include <cmath>

#include "stride_lab/model.hpp"

namespace stride_lab {

struct StanceFlowResult {
  Vec2 r_end;
  Vec2 v_end;
  Vec2 displacement;
  double positive_work = 0.0;
};

namespace detail {

inline Vec2 flow_offset(const Vec2& q0, const Vec2& v0, double c, double s, double omega) {
  return q0 * c + v0 * (s / omega);
}
inline Vec2 flow_velocity(const Vec2& q0, const Vec2& v0, double c, double s, double omega) {
  return q0 * (omega * s) + v0 * c;
}

}  // namespace detail

/// Closed-form stance propagation of the linear inverted pendulum
/// r'' = omega^2 (r - cop), with r the CoM offset from the stance foot and
/// `cop` the centre of pressure relative to the same foot, held fixed.
///
/// The horizontal leg force is m * omega^2 * (r - cop), so its power equals the
/// rate of change of horizontal kinetic energy. That power is
/// m omega^3 (alpha e^{2wt} - beta e^{-2wt}) with alpha, beta >= 0, which is
/// monotone in t; positive work is therefore the kinetic-energy gain from the
/// single sign change (if any) to the end of the interval.
[[nodiscard]] inline StanceFlowResult stance_flow(Vec2 r0, Vec2 v0, double dt, double omega,
                                                  double mass, Vec2 cop = {}) {
  StanceFlowResult out;
  if (dt <= 0.0) {
    out.r_end = r0;
    out.v_end = v0;
    return out;
  }
  const Vec2 q0 = r0 - cop;
  const double c = std::cosh(omega * dt);
  const double s = std::sinh(omega * dt);
  out.r_end = detail::flow_offset(q0, v0, c, s, omega) + cop;
  out.v_end = detail::flow_velocity(q0, v0, c, s, omega);
  out.displacement = out.r_end - r0;

  const Vec2 a = (q0 + v0 / omega) * 0.5;
  const Vec2 b = (q0 - v0 / omega) * 0.5;
  const double alpha = a.dot(a);
  const double beta = b.dot(b);
  const double ke_end = 0.5 * mass * out.v_end.dot(out.v_end);
  if (alpha == 0.0) {
    out.positive_work = 0.0;
  } else if (beta == 0.0) {
    out.positive_work = std::max(0.0, ke_end - 0.5 * mass * v0.dot(v0));
  } else {
    const double t_root = std::log(beta / alpha) / (4.0 * omega);
    if (t_root >= dt) {
      out.positive_work = 0.0;
    } else if (t_root <= 0.0) {
      out.positive_work = std::max(0.0, ke_end - 0.5 * mass * v0.dot(v0));
    } else {
      const double cr = std::cosh(omega * t_root);
      const double sr = std::sinh(omega * t_root);
      const Vec2 v_root = detail::flow_velocity(q0, v0, cr, sr, omega);
      out.positive_work = std::max(0.0, ke_end - 0.5 * mass * v_root.dot(v_root));
    }
  }
  return out;
}

[[nodiscard]] inline StanceFlowResult stance_flow(Vec2 r0, Vec2 v0, double dt,
                                                  const BipedParams& params) {
  return stance_flow(r0, v0, dt, params.omega(), params.mass);
}

}  // namespace stride_lab
