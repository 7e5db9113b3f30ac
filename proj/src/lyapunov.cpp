#include "stochtube/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stochtube/error.hpp"

namespace stochtube {
namespace {

struct StateCov {
  State x;
  SymMat2 q;
};

StateCov axpy(const StateCov& s, double h, const StateCov& k) {
  return {s.x + h * k.x, s.q + h * k.q};
}

// sign = +1: forward Lyapunov equation along x' = v.
// sign = -1: adjoint equation along x' = -v, Q' = Delta - (A Q + Q A^T).
template <int Sign>
StateCov lyap_rhs(const Flow& flow, const SymMat2& delta, const StateCov& z) {
  const State v = flow.velocity(z.x);
  const Mat2 a = flow.jacobian(z.x);
  const SymMat2 dq = drift_term(a, z.q);
  if constexpr (Sign > 0) {
    return {v, dq + delta};
  } else {
    return {-v, delta + (-1.0) * dq};
  }
}

template <int Sign>
StateCov rk4_lyap(const Flow& flow, const SymMat2& delta, const StateCov& s, double h) {
  const StateCov k1 = lyap_rhs<Sign>(flow, delta, s);
  const StateCov k2 = lyap_rhs<Sign>(flow, delta, axpy(s, 0.5 * h, k1));
  const StateCov k3 = lyap_rhs<Sign>(flow, delta, axpy(s, 0.5 * h, k2));
  const StateCov k4 = lyap_rhs<Sign>(flow, delta, axpy(s, h, k3));
  const double w = h / 6.0;
  return {s.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.q + w * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q)};
}

template <int Sign>
std::vector<CovarianceSample> evolve(const Flow& flow, State s0, const CovarianceState& q0,
                                     const NoiseSpec& noise, double t0, const StepPlan& plan,
                                     double dt, double t1) {
  if (!(noise.two_d >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise two_d must be >= 0");
  if (!s0.finite()) throw Error(ErrorKind::NonFinite, "initial state is not finite");
  const SymMat2 delta = noise.tensor();
  const std::size_t total = plan.total();
  std::vector<CovarianceSample> out;
  out.reserve(total + 1);
  StateCov z{s0, q0};
  out.push_back({t0, z.x, z.q});
  for (std::size_t k = 1; k <= total; ++k) {
    const double h = (k <= plan.full) ? dt : plan.rest;
    z = rk4_lyap<Sign>(flow, delta, z, h);
    const double t = (plan.rest > 0.0 && k == total) ? t1 : t0 + static_cast<double>(k) * dt;
    if (!z.x.finite() || !z.q.finite()) {
      std::ostringstream msg;
      msg << "state or covariance overflowed at t=" << t;
      throw Error(ErrorKind::NonFinite, msg.str());
    }
    out.push_back({t, z.x, z.q});
  }
  return out;
}

}  // namespace

CovarianceState forward_step(const CovarianceState& q, const VariationMatrix& a,
                             const NoiseSpec& noise, double dt) {
  const Mat2 m = Mat2::identity() + dt * a;
  return congruence(m, q) + dt * noise.tensor();
}

CovarianceState adjoint_step(const CovarianceState& q_next, const VariationMatrix& a,
                             const NoiseSpec& noise, double dt) {
  const Mat2 m = Mat2::identity() + dt * a;
  if (m.det() == 0.0) throw Error(ErrorKind::SingularJacobian, "1 + A dt is singular");
  return congruence(m.inverse(), q_next + dt * noise.tensor());
}

std::vector<CovarianceSample> evolve_forward(const Flow& flow, State s0, const CovarianceState& q0,
                                             const NoiseSpec& noise, double t0, double t1,
                                             double dt) {
  return evolve<+1>(flow, s0, q0, noise, t0, plan_steps(t0, t1, dt), dt, t1);
}

std::vector<CovarianceSample> evolve_forward_steps(const Flow& flow, State s0,
                                                   const CovarianceState& q0,
                                                   const NoiseSpec& noise, double t0,
                                                   std::size_t n_steps, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be > 0");
  StepPlan plan;
  plan.full = n_steps;
  return evolve<+1>(flow, s0, q0, noise, t0, plan, h, t0 + static_cast<double>(n_steps) * h);
}

std::vector<CovarianceSample> evolve_adjoint(const Flow& flow, State s0, const CovarianceState& q0,
                                             const NoiseSpec& noise, double t0, double t1,
                                             double dt) {
  return evolve<-1>(flow, s0, q0, noise, t0, plan_steps(t0, t1, dt), dt, t1);
}

CovarianceState closed_form_solution(const JacobianPath& jpath, const CovarianceState& q0,
                                     const NoiseSpec& noise) {
  if (jpath.jacobians.empty() || jpath.times.size() != jpath.jacobians.size()) {
    throw Error(ErrorKind::InvalidArgument, "Jacobian path is empty or inconsistent");
  }
  const SymMat2 delta = noise.tensor();
  const std::size_t n = jpath.size();

  if (jpath.steps.size() + 1 == n) {
    // Walk backwards from t with Phi = J(t, s_k) = Phi_{k+1} * J(s_{k+1}, s_k),
    // so no inverse of an accumulated (possibly tiny) Jacobian is ever formed.
    Mat2 phi = Mat2::identity();
    SymMat2 integral = SymMat2::zero();
    SymMat2 later = delta;  // J(t, s_{k+1}) Delta J(t, s_{k+1})^T, starting at s = t
    for (std::size_t k = n - 1; k-- > 0;) {
      phi = phi * jpath.steps[k];
      const SymMat2 term = congruence(phi, delta);
      const double h = jpath.times[k + 1] - jpath.times[k];
      integral = integral + (0.5 * h) * (later + term);
      later = term;
    }
    return congruence(phi, q0) + integral;
  }

  // Without step propagators: J(t,s) = J(t,t0) J(s,t0)^{-1}, so the integral
  // factors as J(t,t0) [int J(s,t0)^{-1} Delta J(s,t0)^{-T} ds] J(t,t0)^T.
  const Mat2& j_end = jpath.jacobians.back();
  SymMat2 inner = SymMat2::zero();
  SymMat2 prev_term;
  for (std::size_t k = 0; k < n; ++k) {
    const Mat2& j = jpath.jacobians[k];
    if (!(j.det() >= 1e-300)) {
      std::ostringstream msg;
      msg << "det J(s,t0) = " << j.det() << " at s=" << jpath.times[k];
      throw Error(ErrorKind::SingularJacobian, msg.str());
    }
    const SymMat2 term = congruence(j.inverse(), delta);
    if (k > 0) {
      const double h = jpath.times[k] - jpath.times[k - 1];
      inner = inner + (0.5 * h) * (prev_term + term);
    }
    prev_term = term;
  }
  return congruence(j_end, q0) + congruence(j_end, inner);
}

TubeSection decompose(const CovarianceState& q, State velocity) {
  const double speed = norm(velocity);
  const State normal = speed > 0.0 ? State{-velocity.y / speed, velocity.x / speed} : State{0.0, 1.0};
  const SymEigen eig = eigen(q);
  const std::size_t transverse =
      std::abs(dot(eig.vectors[0], normal)) >= std::abs(dot(eig.vectors[1], normal)) ? 0 : 1;
  const std::size_t tangent = 1 - transverse;

  auto half_inverse = [](double qv) {
    return qv > 0.0 ? 0.5 / qv : std::numeric_limits<double>::infinity();
  };
  TubeSection out;
  out.lambda1 = half_inverse(eig.values[transverse]);
  out.lambda2 = half_inverse(eig.values[tangent]);
  out.transverse_dir = eig.vectors[transverse];
  out.tangent_dir = eig.vectors[tangent];
  // Orient the transverse eigenvector along the outward normal for stable output.
  if (dot(out.transverse_dir, normal) < 0.0) out.transverse_dir = -out.transverse_dir;
  if (dot(out.tangent_dir, velocity) < 0.0) out.tangent_dir = -out.tangent_dir;
  out.sigma = std::sqrt(std::max(eig.values[transverse], 0.0));
  return out;
}

TubeProfile tube_profile(const Flow& flow, const CycleInfo& cycle, const NoiseSpec& noise,
                         const TubeOptions& opts) {
  if (opts.n_periods < 2) throw Error(ErrorKind::InvalidArgument, "n_periods must be >= 2");
  if (cycle.samples.size() < 2 || !(cycle.period > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "cycle has no samples");
  }
  const std::size_t per = cycle.samples.size() - 1;
  const double h = cycle.period / static_cast<double>(per);
  const auto n_total = per * static_cast<std::size_t>(opts.n_periods);
  const auto path = evolve_forward_steps(flow, cycle.anchor, opts.q0, noise, 0.0, n_total, h);

  const std::size_t last_start = n_total - per;
  const std::size_t prev_start = last_start - per;

  TubeProfile prof;
  prof.period = cycle.period;
  prof.times.reserve(per + 1);
  double worst = 0.0;
  std::size_t worst_at = 0;
  for (std::size_t k = 0; k <= per; ++k) {
    const CovarianceSample& s = path[last_start + k];
    const State v = flow.velocity(s.x);
    const TubeSection sec = decompose(s.q, v);
    const CovarianceSample& p = path[prev_start + k];
    const TubeSection sec_prev = decompose(p.q, flow.velocity(p.x));
    const double rel = std::abs(sec.sigma - sec_prev.sigma) / std::max(sec.sigma, 1e-300);
    if (rel > worst) {
      worst = rel;
      worst_at = k;
    }
    prof.times.push_back(static_cast<double>(k) * h);
    prof.states.push_back(s.x);
    prof.covariances.push_back(s.q);
    prof.sigmas.push_back(sec.sigma);
    prof.lambda1.push_back(sec.lambda1);
    prof.lambda2.push_back(sec.lambda2);
    prof.transverse_dirs.push_back(sec.transverse_dir);
    prof.tangent_dirs.push_back(sec.tangent_dir);
    const double speed = norm(v);
    const State n = speed > 0.0 ? State{-v.y / speed, v.x / speed} : sec.transverse_dir;
    prof.normal_variances.push_back(s.q.quad(n));
  }
  prof.times.back() = cycle.period;
  if (!(worst <= opts.tol_periodic)) {
    std::ostringstream msg;
    msg << "tube width changed by " << worst * 100.0 << "% between the last two periods (sample "
        << worst_at << ")";
    throw Error(ErrorKind::NotConverged, msg.str());
  }
  return prof;
}

double delta_p_min(double lyap, double diffusion) {
  if (!(lyap > 0.0)) throw Error(ErrorKind::NonPositiveRate, "contraction rate must be > 0");
  if (!(diffusion >= 0.0)) throw Error(ErrorKind::InvalidArgument, "diffusion must be >= 0");
  return std::sqrt(diffusion / (2.0 * lyap));
}

double zaslavsky_time(double lyap, double action, double hbar) {
  if (!(lyap > 0.0)) throw Error(ErrorKind::NonPositiveRate, "Lyapunov exponent must be > 0");
  if (!(action > 0.0) || !(hbar > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "action and hbar must be > 0");
  }
  return std::log(action / hbar) / lyap;
}

double diffusive_variance(double variance0, double diffusion, double t) {
  return variance0 + 2.0 * diffusion * t;
}

double ou_stationary_variance(double lyap, double diffusion) {
  if (!(lyap > 0.0)) throw Error(ErrorKind::NonPositiveRate, "relaxation rate must be > 0");
  return diffusion / lyap;
}

}  // namespace stochtube
