#include "stochtube/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stochtube/error.hpp"

namespace stochtube {
namespace {

[[noreturn]] void throw_nonfinite(double t) {
  std::ostringstream msg;
  msg << "state overflowed at t=" << t;
  throw Error(ErrorKind::NonFinite, msg.str());
}

struct StateJac {
  State x;
  Mat2 j;
};

StateJac rk4_step_jac(const Flow& flow, const StateJac& s, double h) {
  auto deriv = [&flow](const StateJac& z) {
    return StateJac{flow.velocity(z.x), flow.jacobian(z.x) * z.j};
  };
  const StateJac k1 = deriv(s);
  const StateJac k2 = deriv({s.x + (0.5 * h) * k1.x, s.j + (0.5 * h) * k1.j});
  const StateJac k3 = deriv({s.x + (0.5 * h) * k2.x, s.j + (0.5 * h) * k2.j});
  const StateJac k4 = deriv({s.x + h * k3.x, s.j + h * k3.j});
  const double w = h / 6.0;
  return {s.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.j + w * (k1.j + 2.0 * k2.j + 2.0 * k3.j + k4.j)};
}

}  // namespace

StepPlan plan_steps(double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
  if (!(t1 >= t0)) throw Error(ErrorKind::InvalidArgument, "t1 must be >= t0");
  const double span = t1 - t0;
  if (span > 0.0 && dt > span * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "dt exceeds the integration interval");
  }
  StepPlan plan;
  plan.full = static_cast<std::size_t>(std::floor(span / dt));
  plan.rest = span - static_cast<double>(plan.full) * dt;
  if (plan.rest <= 1e-9 * dt) {
    plan.rest = 0.0;
  } else if (plan.rest >= dt * (1.0 - 1e-9)) {
    ++plan.full;
    plan.rest = 0.0;
  }
  return plan;
}

State rk4_step(const Flow& flow, State s, double h) {
  const State k1 = flow.velocity(s);
  const State k2 = flow.velocity(s + (0.5 * h) * k1);
  const State k3 = flow.velocity(s + (0.5 * h) * k2);
  const State k4 = flow.velocity(s + h * k3);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_steps(const Flow& flow, State s0, double t0, std::size_t n_steps, double h) {
  Trajectory traj;
  traj.dt = h;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.times.push_back(t0);
  traj.states.push_back(s0);
  State s = s0;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    s = rk4_step(flow, s, h);
    const double t = t0 + static_cast<double>(k) * h;
    if (!s.finite()) throw_nonfinite(t);
    traj.times.push_back(t);
    traj.states.push_back(s);
  }
  return traj;
}

Trajectory integrate_orbit(const Flow& flow, State s0, double t0, double t1, double dt) {
  const StepPlan plan = plan_steps(t0, t1, dt);
  if (!s0.finite()) throw Error(ErrorKind::NonFinite, "initial state is not finite");
  const std::size_t n = plan.full;
  const double rest = plan.rest;
  Trajectory traj = integrate_steps(flow, s0, t0, n, dt);
  if (rest > 0.0) {
    const State s = rk4_step(flow, traj.back(), rest);
    if (!s.finite()) throw_nonfinite(t1);
    traj.times.push_back(t1);
    traj.states.push_back(s);
  } else if (n > 0) {
    traj.times.back() = t1;
  }
  return traj;
}

std::pair<Trajectory, JacobianPath> integrate_with_jacobian(const Flow& flow, State s0, double t0,
                                                            double t1, double dt, bool reversed) {
  const StepPlan plan = plan_steps(t0, t1, dt);
  if (!s0.finite()) throw Error(ErrorKind::NonFinite, "initial state is not finite");
  const Flow f = reversed ? flow.reversed() : flow;
  const std::size_t n = plan.full;
  const double rest = plan.rest;
  const std::size_t total = plan.total();

  Trajectory traj;
  traj.dt = dt;
  JacobianPath jpath;
  traj.times.reserve(total + 1);
  traj.states.reserve(total + 1);
  jpath.jacobians.reserve(total + 1);
  jpath.steps.reserve(total);

  // RK4 is linear in the Jacobian, so stepping from the identity yields the
  // exact one-step propagator of the scheme; the cumulative matrix is then the
  // ordered product.
  State x = s0;
  Mat2 j = Mat2::identity();
  traj.times.push_back(t0);
  traj.states.push_back(x);
  jpath.jacobians.push_back(j);
  for (std::size_t k = 1; k <= total; ++k) {
    const double h = (k <= n) ? dt : rest;
    const StateJac z = rk4_step_jac(f, StateJac{x, Mat2::identity()}, h);
    x = z.x;
    j = z.j * j;
    const double t = (k == total) ? t1 : t0 + static_cast<double>(k) * dt;
    if (!x.finite() || !j.finite()) throw_nonfinite(t);
    traj.times.push_back(t);
    traj.states.push_back(x);
    jpath.jacobians.push_back(j);
    jpath.steps.push_back(z.j);
  }
  jpath.times = traj.times;
  return {std::move(traj), std::move(jpath)};
}

CycleInfo find_limit_cycle(const Flow& flow, State s0, const CycleOptions& opts) {
  if (!(opts.dt > 0.0) || !(opts.tol_cycle > 0.0) || !(opts.transient >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "cycle options must have dt > 0, tol_cycle > 0, transient >= 0");
  }
  if (!s0.finite()) throw Error(ErrorKind::NonFinite, "initial state is not finite");
  if (norm(flow.velocity(s0)) < 1e-12) {
    throw Error(ErrorKind::DegenerateStart, "start point is a fixed point of the flow");
  }

  State x = s0;
  if (opts.transient > 0.0) {
    x = integrate_orbit(flow, s0, 0.0, opts.transient, std::min(opts.dt, opts.transient)).back();
  }
  const State v0 = flow.velocity(x);
  const double speed = norm(v0);
  if (speed < 1e-12) throw Error(ErrorKind::DegenerateStart, "transient settled on a fixed point");

  const State base = x;
  const State normal = (1.0 / speed) * v0;
  auto section = [&](State z) { return dot(z - base, normal); };

  const auto max_steps = static_cast<std::size_t>(std::ceil(opts.max_return_time / opts.dt));

  // Time to the next upward crossing of the section starting on it at `from`.
  auto next_return = [&](State from) -> std::pair<State, double> {
    State prev = from;
    double g_prev = 0.0;
    double t = 0.0;
    for (std::size_t k = 0; k < max_steps; ++k) {
      const State cur = rk4_step(flow, prev, opts.dt);
      if (!cur.finite()) throw_nonfinite(t + opts.dt);
      const double g = section(cur);
      if (g_prev < 0.0 && g >= 0.0) {
        double lo = 0.0;
        double hi = opts.dt;
        while (hi - lo > 1e-10) {
          const double mid = 0.5 * (lo + hi);
          if (section(rk4_step(flow, prev, mid)) < 0.0) lo = mid;
          else hi = mid;
        }
        const double h = 0.5 * (lo + hi);
        return {rk4_step(flow, prev, h), t + h};
      }
      prev = cur;
      g_prev = g;
      t += opts.dt;
    }
    throw Error(ErrorKind::NoConvergence, "no return to the Poincare section within max_return_time");
  };

  State last = base;
  for (int it = 0; it < opts.max_returns; ++it) {
    const auto [ret, period] = next_return(last);
    if (norm(ret - last) < opts.tol_cycle) {
      CycleInfo info;
      info.period = period;
      info.anchor = ret;
      info.section_normal = normal;
      const auto n = static_cast<std::size_t>(std::ceil(period / opts.dt));
      info.samples = integrate_steps(flow, ret, 0.0, n, period / static_cast<double>(n));
      info.samples.times.back() = period;
      return info;
    }
    last = ret;
  }
  std::ostringstream msg;
  msg << "successive section returns did not agree to " << opts.tol_cycle << " within "
      << opts.max_returns << " returns";
  throw Error(ErrorKind::NoConvergence, msg.str());
}

Mat2 monodromy(const Flow& flow, const CycleInfo& cycle) {
  const double dt = std::min(cycle.samples.dt, cycle.period);
  return integrate_with_jacobian(flow, cycle.anchor, 0.0, cycle.period, dt).second.jacobians.back();
}

}  // namespace stochtube
