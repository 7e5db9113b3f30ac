#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stochtube/dynamics.hpp"
#include "stochtube/integrate.hpp"
#include "stochtube/lyapunov.hpp"
#include "stochtube/simd/kernels.hpp"

namespace stochtube {

/// Ensemble Euler-Maruyama run of dx = v(x) dt + sqrt(2D) dW.
struct EnsembleConfig {
  std::size_t n_traj = 10000;
  double t_end = 60.0;
  double dt = 1e-3;
  /// Discarded initial horizon; defaults to t_end / 3.
  std::optional<double> burn_in;
  std::uint64_t seed = 1;
  /// The drift; a SystemSpec or a linear field. Reversed flows are rejected.
  Flow flow = SystemSpec::hopf();
  NoiseSpec noise;
  /// Common start point of all trajectories.
  State start{1.0, 0.0};
  /// Time between retained samples; 0 picks the smallest multiple of dt that
  /// keeps at most max_samples samples.
  double thin = 0.0;
  std::size_t max_samples = 10'000'000;
  /// Worker threads; 0 uses STOCHTUBE_THREADS or the hardware concurrency.
  unsigned threads = 0;
  /// Kernel table override (tests use this to compare ISAs).
  const simd::Kernels* kernels = nullptr;

  [[nodiscard]] double burn_in_time() const { return burn_in.value_or(t_end / 3.0); }
  /// Throws InvalidArgument on violated invariants.
  void validate() const;
};

/// Per-section transverse statistics of samples around a reference cycle.
struct SectionStat {
  double phase_begin = 0.0;  ///< fraction of the period
  double phase_end = 0.0;
  std::size_t count = 0;
  double mean = 0.0;      ///< mean signed normal offset
  double variance = 0.0;  ///< variance of the signed normal offset
};

struct EnsembleStats {
  /// Retained post-burn-in states, trajectory-major: samples[k * per_traj + j].
  std::vector<State> samples;
  std::size_t n_traj = 0;
  std::size_t per_traj = 0;
  double thin = 0.0;
  /// Moments of r - r_c (HopfCircle only; r_c = 0 reference for other fields).
  double radial_mean = 0.0;
  double radial_variance = 0.0;
  /// Standard error of radial_variance from the spread of per-trajectory estimates.
  double radial_variance_stderr = 0.0;
  /// Per-component variance of x and y (used for linear/OU checks).
  double var_x = 0.0;
  double var_y = 0.0;
};

/// Runs the ensemble. Deterministic in cfg (including seed), independent of
/// thread count and kernel ISA. Throws NonFinite naming the diverged trajectory.
EnsembleStats simulate_ensemble(const EnsembleConfig& cfg);

/// Closest point on the closed polyline through a cycle's samples.
struct CycleProjection {
  double phase = 0.0;   ///< position along the cycle as a fraction of the period
  double offset = 0.0;  ///< signed distance along the left normal of the flow
  std::size_t segment = 0;
  double tau = 0.0;     ///< position within the segment, [0, 1]
};

/// Nearest-point locator on a cycle polyline, backed by the SIMD kernels.
class CycleLocator {
 public:
  /// `max_points` caps the polyline resolution (samples are decimated evenly in time).
  explicit CycleLocator(const CycleInfo& cycle, std::size_t max_points = 4096,
                        const simd::Kernels* kernels = nullptr);
  CycleLocator(std::span<const State> closed_points, std::span<const double> phases,
               const simd::Kernels* kernels = nullptr);

  [[nodiscard]] CycleProjection project(State p) const;
  [[nodiscard]] std::size_t size() const { return xs_.size(); }

 private:
  void build(std::span<const State> pts, std::span<const double> phases);

  std::vector<double> xs_, ys_;
  std::vector<double> phase_;  // phase at each polyline vertex; size n + 1 (closing vertex)
  const simd::Kernels* k_;
};

/// Bins samples by their nearest cycle position and reports the mean and
/// variance of the signed normal offset in each of n_sections equal phase
/// bins. Throws EmptyBin when a bin has fewer than min_count samples.
std::vector<SectionStat> section_statistics(std::span<const State> samples, const CycleInfo& cycle,
                                            std::size_t n_sections, std::size_t min_count = 100);

/// Tube variance along the velocity normal (TubeProfile::normal_variances)
/// averaged over the same phase bins as section_statistics.
std::vector<double> tube_section_variance(const TubeProfile& profile, std::size_t n_sections);

/// Worker count from STOCHTUBE_THREADS or hardware concurrency.
unsigned default_threads();

}  // namespace stochtube
