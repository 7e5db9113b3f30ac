#pragma once

#include <array>
#include <cmath>

namespace stochtube {

/// Point (or vector) in the plane.
struct State {
  double x = 0.0;
  double y = 0.0;

  friend constexpr State operator+(State a, State b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr State operator-(State a, State b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr State operator-(State a) { return {-a.x, -a.y}; }
  friend constexpr State operator*(double s, State a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(State, State) = default;

  [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dot(State a, State b) { return a.x * b.x + a.y * b.y; }
inline double norm(State a) { return std::hypot(a.x, a.y); }

/// General 2x2 matrix, row-major. Used for variation matrices and Jacobians.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diag(double d) { return {d, 0.0, 0.0, d}; }

  [[nodiscard]] constexpr double det() const { return a11 * a22 - a12 * a21; }
  [[nodiscard]] constexpr double trace() const { return a11 + a22; }
  [[nodiscard]] constexpr Mat2 transposed() const { return {a11, a21, a12, a22}; }
  /// Caller checks det() first.
  [[nodiscard]] constexpr Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  friend constexpr Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend constexpr Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend constexpr Mat2 operator-(const Mat2& a) { return {-a.a11, -a.a12, -a.a21, -a.a22}; }
  friend constexpr Mat2 operator*(double s, const Mat2& a) {
    return {s * a.a11, s * a.a12, s * a.a21, s * a.a22};
  }
  friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend constexpr State operator*(const Mat2& a, State v) {
    return {a.a11 * v.x + a.a12 * v.y, a.a21 * v.x + a.a22 * v.y};
  }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;

  [[nodiscard]] bool finite() const {
    return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) && std::isfinite(a22);
  }
};

/// Matrix of variations dv/dx at a state.
using VariationMatrix = Mat2;

/// Symmetric 2x2 matrix; only the upper triangle is stored.
struct SymMat2 {
  double q11 = 0.0, q12 = 0.0, q22 = 0.0;

  static constexpr SymMat2 zero() { return {}; }
  static constexpr SymMat2 diag(double d) { return {d, 0.0, d}; }
  /// Symmetric part of a general matrix.
  static constexpr SymMat2 from(const Mat2& m) { return {m.a11, 0.5 * (m.a12 + m.a21), m.a22}; }

  [[nodiscard]] constexpr Mat2 full() const { return {q11, q12, q12, q22}; }
  [[nodiscard]] constexpr double det() const { return q11 * q22 - q12 * q12; }
  [[nodiscard]] constexpr double trace() const { return q11 + q22; }
  [[nodiscard]] double quad(State v) const {
    return q11 * v.x * v.x + 2.0 * q12 * v.x * v.y + q22 * v.y * v.y;
  }

  friend constexpr SymMat2 operator+(const SymMat2& a, const SymMat2& b) {
    return {a.q11 + b.q11, a.q12 + b.q12, a.q22 + b.q22};
  }
  friend constexpr SymMat2 operator*(double s, const SymMat2& a) {
    return {s * a.q11, s * a.q12, s * a.q22};
  }
  friend constexpr bool operator==(const SymMat2&, const SymMat2&) = default;

  [[nodiscard]] bool finite() const {
    return std::isfinite(q11) && std::isfinite(q12) && std::isfinite(q22);
  }
};

/// Covariance of a local Gaussian density, exp(-1/2 z^T Q^{-1} z).
using CovarianceState = SymMat2;

/// A Q^T for symmetric Q, returned as its symmetric part.
constexpr SymMat2 congruence(const Mat2& a, const SymMat2& q) {
  const Mat2 aq = a * q.full();
  const Mat2 r = aq * a.transposed();
  return {r.a11, 0.5 * (r.a12 + r.a21), r.a22};
}

/// A Q + Q A^T for symmetric Q.
constexpr SymMat2 drift_term(const Mat2& a, const SymMat2& q) {
  // (AQ)_ij + (AQ)_ji
  const double aq11 = a.a11 * q.q11 + a.a12 * q.q12;
  const double aq12 = a.a11 * q.q12 + a.a12 * q.q22;
  const double aq21 = a.a21 * q.q11 + a.a22 * q.q12;
  const double aq22 = a.a21 * q.q12 + a.a22 * q.q22;
  return {2.0 * aq11, aq12 + aq21, 2.0 * aq22};
}

/// Eigen-decomposition of a symmetric 2x2 matrix. values[0] <= values[1];
/// vectors[i] is the unit eigenvector for values[i].
struct SymEigen {
  std::array<double, 2> values{};
  std::array<State, 2> vectors{};
};

SymEigen eigen(const SymMat2& m);

/// Eigenvalues of a general 2x2 matrix (possibly complex): returns
/// (re0, im0, re1, im1).
struct Eigenvalues2 {
  double re0 = 0.0, im0 = 0.0, re1 = 0.0, im1 = 0.0;
};
Eigenvalues2 eigenvalues(const Mat2& m);

}  // namespace stochtube
