#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace stochtube::simd {

// Data-parallel inner loops of the Langevin ensemble and the tube/section
// geometry. Every kernel has a portable scalar reference and an AVX2 variant;
// both perform the same IEEE operations in the same order (no FMA
// contraction), so their outputs agree bitwise and results do not depend on
// which one the dispatcher picks.

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Drift of one of the supported planar fields, flattened for the kernels.
struct DriftParams {
  enum class Kind : int { Hopf, VanDerPol, Rayleigh, Linear };
  Kind kind = Kind::Hopf;
  // Hopf: lambda, r_c, omega. VanDerPol/Rayleigh: mu, b, omega0. Linear: a11, a12, a21, a22.
  double p[4] = {0.0, 0.0, 0.0, 0.0};
};

struct Kernels {
  Isa isa;

  /// Standard normal pairs for trajectories [first_traj, first_traj + count) at
  /// one time step. Each pair is a pure function of (seed, trajectory, step).
  void (*normals)(std::uint64_t seed, std::uint64_t first_traj, std::uint64_t step,
                  std::size_t count, double* gx, double* gy);

  /// Euler-Maruyama update x <- x + v(x) dt + scale * g for `count` trajectories (SoA).
  void (*em_step)(const DriftParams& drift, double dt, double scale, std::size_t count, double* x,
                  double* y, const double* gx, const double* gy);

  /// Index of the point (cx[i], cy[i]) closest to (px, py); lowest index on ties.
  /// Requires m >= 1.
  std::size_t (*nearest)(double px, double py, const double* cx, const double* cy, std::size_t m);
};

bool cpu_has_avx2();

/// Kernel table for a specific ISA. Asking for Avx2 on a CPU without it
/// returns the scalar table.
const Kernels& kernels(Isa isa);

/// Table chosen at first use: the best ISA the CPU supports, unless the
/// STOCHTUBE_SIMD environment variable is set to "scalar".
const Kernels& active();

namespace scalar {
void normals(std::uint64_t seed, std::uint64_t first_traj, std::uint64_t step, std::size_t count,
             double* gx, double* gy);
void em_step(const DriftParams& drift, double dt, double scale, std::size_t count, double* x,
             double* y, const double* gx, const double* gy);
std::size_t nearest(double px, double py, const double* cx, const double* cy, std::size_t m);

/// Polynomial natural log on (0, 1] and sin/cos of 2*pi*u on [0, 1) used by
/// the normal generator; exposed for accuracy tests.
double log_unit(double u);
void sincos_turn(double u, double& s, double& c);
}  // namespace scalar

#if defined(STOCHTUBE_HAVE_AVX2)
namespace avx2 {
void normals(std::uint64_t seed, std::uint64_t first_traj, std::uint64_t step, std::size_t count,
             double* gx, double* gy);
void em_step(const DriftParams& drift, double dt, double scale, std::size_t count, double* x,
             double* y, const double* gx, const double* gy);
std::size_t nearest(double px, double py, const double* cx, const double* cy, std::size_t m);
}  // namespace avx2
#endif

}  // namespace stochtube::simd
