#include "stochtube/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "stochtube/error.hpp"

namespace stochtube {

std::string_view system_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::HopfCircle: return "hopf";
    case SystemKind::VanDerPol: return "vdp";
    case SystemKind::Rayleigh: return "rayleigh";
  }
  return "unknown";
}

SystemSpec SystemSpec::hopf(double lambda, double r_c, double omega) {
  SystemSpec s;
  s.kind = SystemKind::HopfCircle;
  s.lambda = lambda;
  s.r_c = r_c;
  s.omega = omega;
  return s;
}

SystemSpec SystemSpec::van_der_pol(double mu, double b, double omega0) {
  SystemSpec s;
  s.kind = SystemKind::VanDerPol;
  s.mu = mu;
  s.b = b;
  s.omega0 = omega0;
  return s;
}

SystemSpec SystemSpec::rayleigh(double mu, double b, double omega0) {
  SystemSpec s;
  s.kind = SystemKind::Rayleigh;
  s.mu = mu;
  s.b = b;
  s.omega0 = omega0;
  return s;
}

void SystemSpec::validate() const {
  std::ostringstream msg;
  if (kind == SystemKind::HopfCircle) {
    if (!(lambda > 0.0)) msg << "lambda must be > 0 (got " << lambda << ")";
    else if (!(r_c > 0.0)) msg << "r_c must be > 0 (got " << r_c << ")";
    else if (!(omega != 0.0) || !std::isfinite(omega)) msg << "omega must be finite and nonzero";
  } else {
    if (!(mu > 0.0)) msg << "mu must be > 0 (got " << mu << ")";
    else if (!(b > 0.0)) msg << "b must be > 0 (got " << b << ")";
    else if (!(omega0 > 0.0)) msg << "omega0 must be > 0 (got " << omega0 << ")";
  }
  if (!msg.str().empty()) throw Error(ErrorKind::InvalidSpec, msg.str());
}

State velocity(const SystemSpec& spec, State s) {
  switch (spec.kind) {
    case SystemKind::HopfCircle: {
      const double g = spec.lambda * (spec.r_c - std::sqrt(s.x * s.x + s.y * s.y));
      return {g * s.x - spec.omega * s.y, g * s.y + spec.omega * s.x};
    }
    case SystemKind::VanDerPol:
      return {s.y, -spec.mu * (s.x * s.x - spec.b) * s.y - spec.omega0 * spec.omega0 * s.x};
    case SystemKind::Rayleigh:
      return {s.y - spec.mu * (s.x * s.x * s.x / 3.0 - spec.b * s.x),
              -spec.omega0 * spec.omega0 * s.x};
  }
  return {};
}

VariationMatrix variation_matrix(const SystemSpec& spec, State s) {
  switch (spec.kind) {
    case SystemKind::HopfCircle: {
      const double r = std::sqrt(s.x * s.x + s.y * s.y);
      if (r == 0.0) {
        throw Error(ErrorKind::OriginSingularity, "HopfCircle variation matrix undefined at the origin");
      }
      // d/dx [lambda (r_c - r) x] = lambda (r_c - r) - lambda x^2 / r
      const double g = spec.lambda * (spec.r_c - r);
      const double k = spec.lambda / r;
      return {g - k * s.x * s.x, -k * s.x * s.y - spec.omega,
              -k * s.x * s.y + spec.omega, g - k * s.y * s.y};
    }
    case SystemKind::VanDerPol:
      return {0.0, 1.0, -2.0 * spec.mu * s.x * s.y - spec.omega0 * spec.omega0,
              -spec.mu * (s.x * s.x - spec.b)};
    case SystemKind::Rayleigh:
      return {-spec.mu * (s.x * s.x - spec.b), 1.0, -spec.omega0 * spec.omega0, 0.0};
  }
  return {};
}

State reversed_velocity(const SystemSpec& spec, State s) { return -velocity(spec, s); }

VariationMatrix reversed_variation_matrix(const SystemSpec& spec, State s) {
  return -variation_matrix(spec, s);
}

State Flow::velocity(State s) const {
  const State v = std::visit(
      [s](const auto& f) -> State {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, SystemSpec>) {
          return stochtube::velocity(f, s);
        } else {
          return f.a * s;
        }
      },
      field_);
  return reversed_ ? -v : v;
}

Mat2 Flow::jacobian(State s) const {
  const Mat2 a = std::visit(
      [s](const auto& f) -> Mat2 {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, SystemSpec>) {
          return variation_matrix(f, s);
        } else {
          return f.a;
        }
      },
      field_);
  return reversed_ ? -a : a;
}

}  // namespace stochtube
