#include <bit>
#include <cmath>

#include "poly.hpp"
#include "stochtube/rng.hpp"
#include "stochtube/simd/kernels.hpp"

namespace stochtube::simd::scalar {

using namespace detail;

double log_unit(double u) {
  const auto bits = std::bit_cast<std::uint64_t>(u);
  double e = std::bit_cast<double>((bits >> 52) | kTwo52Bits) - kTwo52 - 1023.0;
  double m = std::bit_cast<double>((bits & kMantMask) | kExpOne);
  if (m > kSqrt2) {
    m = m * 0.5;
    e = e + 1.0;
  }
  const double s = (m - 1.0) / (m + 1.0);
  const double s2 = s * s;
  double p = kLogCoef[kLogTerms - 1];
  for (int i = kLogTerms - 2; i >= 0; --i) p = p * s2 + kLogCoef[i];
  return e * kLn2Hi + (e * kLn2Lo + (2.0 * s) * p);
}

void sincos_turn(double u, double& s, double& c) {
  const double k = std::floor(u * 4.0 + 0.5);
  const double x = kTwoPi * (u - k * 0.25);
  const double x2 = x * x;
  double ps = kSin[kTrigTerms - 1];
  double pc = kCos[kTrigTerms - 1];
  for (int i = kTrigTerms - 2; i >= 0; --i) {
    ps = ps * x2 + kSin[i];
    pc = pc * x2 + kCos[i];
  }
  const double sn = x * ps;
  const double cs = pc;
  if (k == 1.0) {
    s = cs;
    c = -sn;
  } else if (k == 2.0) {
    s = -sn;
    c = -cs;
  } else if (k == 3.0) {
    s = -cs;
    c = sn;
  } else {
    s = sn;
    c = cs;
  }
}

void normals(std::uint64_t seed, std::uint64_t first_traj, std::uint64_t step, std::size_t count,
             double* gx, double* gy) {
  for (std::size_t i = 0; i < count; ++i) {
    const rng::Block blk = rng::stream_block(seed, first_traj + i, step);
    const std::uint64_t w1 = (static_cast<std::uint64_t>(blk[0]) << 32) | blk[1];
    const std::uint64_t w2 = (static_cast<std::uint64_t>(blk[2]) << 32) | blk[3];
    const double u1 = 2.0 - std::bit_cast<double>(kExpOne | (w1 >> 12));  // (0, 1]
    const double u2 = std::bit_cast<double>(kExpOne | (w2 >> 12)) - 1.0;  // [0, 1)
    const double r = std::sqrt(-2.0 * log_unit(u1));
    double s = 0.0;
    double c = 0.0;
    sincos_turn(u2, s, c);
    gx[i] = r * c;
    gy[i] = r * s;
  }
}

void em_step(const DriftParams& drift, double dt, double scale, std::size_t count, double* x,
             double* y, const double* gx, const double* gy) {
  const double p0 = drift.p[0];
  const double p1 = drift.p[1];
  const double p2 = drift.p[2];
  const double p3 = drift.p[3];
  for (std::size_t i = 0; i < count; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    double vx = 0.0;
    double vy = 0.0;
    switch (drift.kind) {
      case DriftParams::Kind::Hopf: {
        const double g = p0 * (p1 - std::sqrt(xi * xi + yi * yi));
        vx = g * xi - p2 * yi;
        vy = g * yi + p2 * xi;
        break;
      }
      case DriftParams::Kind::VanDerPol:
        vx = yi;
        vy = -p0 * (xi * xi - p1) * yi - p2 * p2 * xi;
        break;
      case DriftParams::Kind::Rayleigh:
        vx = yi - p0 * (xi * xi * xi / 3.0 - p1 * xi);
        vy = -p2 * p2 * xi;
        break;
      case DriftParams::Kind::Linear:
        vx = p0 * xi + p1 * yi;
        vy = p2 * xi + p3 * yi;
        break;
    }
    x[i] = xi + vx * dt + scale * gx[i];
    y[i] = yi + vy * dt + scale * gy[i];
  }
}

std::size_t nearest(double px, double py, const double* cx, const double* cy, std::size_t m) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = cx[i] - px;
    const double dy = cy[i] - py;
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace stochtube::simd::scalar
