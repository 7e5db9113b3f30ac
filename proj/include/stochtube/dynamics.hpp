#pragma once

#include <string_view>
#include <variant>

#include "stochtube/types.hpp"

namespace stochtube {

enum class SystemKind { HopfCircle, VanDerPol, Rayleigh };

std::string_view system_name(SystemKind kind);

/// Parameterized planar vector field with a stable limit cycle.
///
/// HopfCircle:  x' = lambda (r_c - r) x - omega y,   y' = lambda (r_c - r) y + omega x
/// VanDerPol:   x' = y,                              y' = -mu (x^2 - b) y - omega0^2 x
/// Rayleigh:    x' = y - mu (x^3/3 - b x),           y' = -omega0^2 x
struct SystemSpec {
  SystemKind kind = SystemKind::HopfCircle;
  double lambda = 1.0;
  double r_c = 1.0;
  double omega = 1.0;
  double mu = 0.2;
  double b = 3.0;
  double omega0 = 1.0;

  static SystemSpec hopf(double lambda = 1.0, double r_c = 1.0, double omega = 1.0);
  static SystemSpec van_der_pol(double mu, double b = 3.0, double omega0 = 1.0);
  static SystemSpec rayleigh(double mu, double b = 3.0, double omega0 = 1.0);

  /// Throws Error(InvalidSpec) when parameters leave the stable-cycle regime.
  void validate() const;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

State velocity(const SystemSpec& spec, State s);

/// Analytic dv/dx. Throws OriginSingularity for HopfCircle at (0,0).
VariationMatrix variation_matrix(const SystemSpec& spec, State s);

/// Velocity of the time-reversed flow, -v(s). Its variation matrix is -A.
State reversed_velocity(const SystemSpec& spec, State s);
VariationMatrix reversed_variation_matrix(const SystemSpec& spec, State s);

/// Linear field v(s) = A s, used for synthetic constant-A problems.
struct LinearField {
  Mat2 a;
};

/// A planar flow: one of the benchmark systems or a linear field, optionally
/// time-reversed. Cheap value type consumed by the integrators.
class Flow {
 public:
  Flow(const SystemSpec& spec) : field_(spec) {}  // NOLINT(google-explicit-constructor)
  Flow(LinearField lin) : field_(lin) {}          // NOLINT(google-explicit-constructor)

  static Flow linear(const Mat2& a) { return Flow(LinearField{a}); }

  [[nodiscard]] Flow reversed() const {
    Flow f = *this;
    f.reversed_ = !reversed_;
    return f;
  }
  [[nodiscard]] bool is_reversed() const { return reversed_; }

  [[nodiscard]] State velocity(State s) const;
  [[nodiscard]] Mat2 jacobian(State s) const;

  /// Underlying (forward) system, if this flow wraps a SystemSpec.
  [[nodiscard]] const SystemSpec* system() const { return std::get_if<SystemSpec>(&field_); }
  [[nodiscard]] const LinearField* linear_field() const { return std::get_if<LinearField>(&field_); }

 private:
  std::variant<SystemSpec, LinearField> field_;
  bool reversed_ = false;
};

}  // namespace stochtube
