#pragma once

#include <cstddef>
#include <vector>

#include "stochtube/dynamics.hpp"
#include "stochtube/integrate.hpp"
#include "stochtube/types.hpp"

namespace stochtube {

/// Isotropic additive noise with diffusion tensor diag(2D, 2D).
struct NoiseSpec {
  double two_d = 0.1;

  [[nodiscard]] double d() const { return 0.5 * two_d; }
  [[nodiscard]] SymMat2 tensor() const { return SymMat2::diag(two_d); }
};

struct CovarianceSample {
  double t = 0.0;
  State x;
  CovarianceState q;
};

/// One step of the discrete covariance map Q' = Delta dt + (1 + A dt) Q (1 + A dt)^T.
CovarianceState forward_step(const CovarianceState& q, const VariationMatrix& a,
                             const NoiseSpec& noise, double dt);

/// Inverse map: Q_a = (1 + A dt)^{-1} (Q_{a+1} + Delta dt) (1 + A dt)^{-T}.
CovarianceState adjoint_step(const CovarianceState& q_next, const VariationMatrix& a,
                             const NoiseSpec& noise, double dt);

/// Joint RK4 of x' = v(x), Q' = A Q + Q A^T + Delta, A = dv/dx at the current state.
std::vector<CovarianceSample> evolve_forward(const Flow& flow, State s0, const CovarianceState& q0,
                                             const NoiseSpec& noise, double t0, double t1, double dt);

/// As evolve_forward with n_steps uniform steps of size h.
std::vector<CovarianceSample> evolve_forward_steps(const Flow& flow, State s0,
                                                   const CovarianceState& q0,
                                                   const NoiseSpec& noise, double t0,
                                                   std::size_t n_steps, double h);

/// Adjoint (backward) Lyapunov evolution along the reversed flow:
/// x' = -v(x), Q' = Delta - A Q - Q A^T with A = dv/dx.
std::vector<CovarianceSample> evolve_adjoint(const Flow& flow, State s0, const CovarianceState& q0,
                                             const NoiseSpec& noise, double t0, double t1, double dt);

/// Q(t) = J Q0 J^T + int_{t0}^{t} J(t,s) Delta J(t,s)^T ds, the integral by the
/// trapezoidal rule on jpath's grid. J(t,s) is the product of jpath.steps when
/// those are present, else J(t,t0) J(s,t0)^{-1} (throws SingularJacobian).
CovarianceState closed_form_solution(const JacobianPath& jpath, const CovarianceState& q0,
                                     const NoiseSpec& noise);

/// Steady covariance tube around a limit cycle, sampled over one period.
struct TubeProfile {
  double period = 0.0;
  std::vector<double> times;          ///< relative to the start of the retained period
  std::vector<State> states;
  std::vector<CovarianceState> covariances;
  std::vector<double> sigmas;         ///< transverse width sqrt(1 / (2 Lambda1))
  std::vector<double> lambda1;        ///< transverse eigenvalue of Q^{-1}/2
  std::vector<double> lambda2;        ///< tangent eigenvalue of Q^{-1}/2
  std::vector<State> transverse_dirs; ///< unit eigenvector for lambda1
  std::vector<State> tangent_dirs;    ///< unit eigenvector for lambda2
  /// n^T Q n for the unit velocity normal n. Unlike sigma^2 this does not pick
  /// up the tangent-normal cross covariance, so it is what a nearest-point
  /// projection of noisy samples onto the cycle measures; sigma^2 approaches
  /// it as the phase variance grows.
  std::vector<double> normal_variances;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] bool empty() const { return times.empty(); }
};

struct TubeOptions {
  int n_periods = 10;
  double tol_periodic = 0.01;
  /// Start covariance; zero gives a purely noise-generated tube.
  CovarianceState q0 = CovarianceState::zero();
};

/// Runs the forward Lyapunov equation from the cycle anchor for n_periods and
/// decomposes the final period. Throws NotConverged when sigma differs from
/// the preceding period by more than tol_periodic (relative, pointwise).
TubeProfile tube_profile(const Flow& flow, const CycleInfo& cycle, const NoiseSpec& noise,
                         const TubeOptions& opts = {});

/// Transverse/tangent split of one covariance sample. `velocity` fixes the
/// tangent; the transverse eigenvector is the one with the largest overlap
/// with the velocity normal.
struct TubeSection {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  State transverse_dir;
  State tangent_dir;
  double sigma = 0.0;
};
TubeSection decompose(const CovarianceState& q, State velocity);

/// Minimal contracting-direction scale sqrt(D / (2 lambda)). Throws NonPositiveRate.
double delta_p_min(double lyap, double diffusion);

/// Logarithmic time (1/lambda) ln(action / hbar). Throws NonPositiveRate.
double zaslavsky_time(double lyap, double action, double hbar);

/// Variance of free diffusion with coefficient D after time t.
double diffusive_variance(double variance0, double diffusion, double t);

/// Stationary variance D / lambda of the scalar Ornstein-Uhlenbeck process
/// dz = -lambda z dt + sqrt(2D) dW.
double ou_stationary_variance(double lyap, double diffusion);

}  // namespace stochtube
