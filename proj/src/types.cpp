#include "stochtube/types.hpp"

#include <algorithm>
#include <cmath>

namespace stochtube {

SymEigen eigen(const SymMat2& m) {
  SymEigen out;
  const double mean = 0.5 * (m.q11 + m.q22);
  const double half_diff = 0.5 * (m.q11 - m.q22);
  const double rad = std::hypot(half_diff, m.q12);
  out.values = {mean - rad, mean + rad};

  if (rad == 0.0) {
    out.vectors = {State{1.0, 0.0}, State{0.0, 1.0}};
    return out;
  }
  // Angle of the eigenvector of the larger eigenvalue; numerically stable
  // for both nearly-diagonal and strongly-coupled matrices.
  const double theta = 0.5 * std::atan2(2.0 * m.q12, m.q11 - m.q22);
  const State major{std::cos(theta), std::sin(theta)};
  out.vectors = {State{-major.y, major.x}, major};
  return out;
}

Eigenvalues2 eigenvalues(const Mat2& m) {
  const double tr = m.trace();
  const double det = m.det();
  const double disc = 0.25 * tr * tr - det;
  Eigenvalues2 ev;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    // Avoid cancellation in the smaller root.
    const double big = 0.5 * tr + std::copysign(s, tr);
    const double small = big != 0.0 ? det / big : 0.0;
    ev.re0 = std::min(big, small);
    ev.re1 = std::max(big, small);
  } else {
    const double s = std::sqrt(-disc);
    ev.re0 = ev.re1 = 0.5 * tr;
    ev.im0 = -s;
    ev.im1 = s;
  }
  return ev;
}

}  // namespace stochtube
