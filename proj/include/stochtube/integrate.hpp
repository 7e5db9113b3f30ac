#pragma once

#include <cstddef>
#include <vector>

#include "stochtube/dynamics.hpp"
#include "stochtube/types.hpp"

namespace stochtube {

/// Time-stamped samples of a deterministic orbit.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  double dt = 0.0;

  [[nodiscard]] std::size_t size() const { return states.size(); }
  [[nodiscard]] const State& back() const { return states.back(); }
};

/// Transition matrices J(t, t0) sampled on a trajectory's time grid.
struct JacobianPath {
  std::vector<double> times;
  std::vector<Mat2> jacobians;
  /// Optional one-step propagators J(t_{k+1}, t_k), size() - 1 entries. When
  /// present, jacobians[k + 1] == steps[k] * jacobians[k] and consumers can
  /// form J(t, s) as a product instead of J(t) J(s)^{-1}, which loses all
  /// precision once J is strongly contracting.
  std::vector<Mat2> steps;

  [[nodiscard]] std::size_t size() const { return jacobians.size(); }
};

/// A detected periodic orbit.
struct CycleInfo {
  double period = 0.0;
  State anchor;
  /// One period starting at the anchor, sampled with step period / N (N = ceil(period / dt)).
  Trajectory samples;
  /// Unit normal of the Poincare section line through the anchor (the
  /// direction of the flow at the section's base point).
  State section_normal;
};

struct CycleOptions {
  double transient = 100.0;
  double tol_cycle = 1e-8;
  double dt = 1e-3;
  int max_returns = 2000;
  /// Longest allowed time between two section crossings.
  double max_return_time = 1e4;
};

/// Fixed-step grid over [t0, t1]: `full` steps of dt, then one shortened step
/// of `rest` (0 when dt divides the span). Throws InvalidArgument.
struct StepPlan {
  std::size_t full = 0;
  double rest = 0.0;

  [[nodiscard]] std::size_t total() const { return full + (rest > 0.0 ? 1 : 0); }
};
StepPlan plan_steps(double t0, double t1, double dt);

/// One classical RK4 step of the autonomous flow.
State rk4_step(const Flow& flow, State s, double h);

/// Fixed-step RK4 from t0 to t1; the last step is shortened to land on t1.
/// Throws NonFinite if the state overflows.
Trajectory integrate_orbit(const Flow& flow, State s0, double t0, double t1, double dt);

/// n_steps RK4 steps of exactly h each, starting at time t0.
Trajectory integrate_steps(const Flow& flow, State s0, double t0, std::size_t n_steps, double h);

/// Joint RK4 integration of the state and the variational equation
/// dJ/dt = A(x(t)) J, J(t0, t0) = 1. With reversed set the state follows
/// x' = -v and dJ/dt = -A J.
std::pair<Trajectory, JacobianPath> integrate_with_jacobian(const Flow& flow, State s0, double t0,
                                                            double t1, double dt,
                                                            bool reversed = false);

/// Locates the attracting periodic orbit reached from s0 by Poincare-section
/// returns. Throws DegenerateStart, NoConvergence, NonFinite.
CycleInfo find_limit_cycle(const Flow& flow, State s0, const CycleOptions& opts = {});

/// Monodromy matrix of a detected cycle (J after one period from the anchor).
Mat2 monodromy(const Flow& flow, const CycleInfo& cycle);

}  // namespace stochtube
