#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stochtube/lyapunov.hpp"
#include "stochtube/types.hpp"

namespace stochtube {

/// Rectangular extent and resolution of a density grid. Cell (ix, iy) has
/// center (x_min + (ix + 1/2) dx, y_min + (iy + 1/2) dy).
struct GridSpec {
  double x_min = -2.0, x_max = 2.0;
  double y_min = -2.0, y_max = 2.0;
  std::size_t nx = 400, ny = 400;

  [[nodiscard]] double dx() const { return (x_max - x_min) / static_cast<double>(nx); }
  [[nodiscard]] double dy() const { return (y_max - y_min) / static_cast<double>(ny); }
  [[nodiscard]] double cell_area() const { return dx() * dy(); }
  [[nodiscard]] State center(std::size_t ix, std::size_t iy) const {
    return {x_min + (static_cast<double>(ix) + 0.5) * dx(), y_min + (static_cast<double>(iy) + 0.5) * dy()};
  }
  /// Throws InvalidArgument for empty or inverted extents.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class Normalization { Unnormalized, UnitMass };

/// Non-negative scalar field, row-major with y outer: values[iy * nx + ix].
struct DensityGrid {
  GridSpec grid;
  std::vector<double> values;
  Normalization norm = Normalization::Unnormalized;

  explicit DensityGrid(const GridSpec& g = {})
      : grid(g), values(g.nx * g.ny, 0.0) {}

  [[nodiscard]] double& at(std::size_t ix, std::size_t iy) { return values[iy * grid.nx + ix]; }
  [[nodiscard]] double at(std::size_t ix, std::size_t iy) const { return values[iy * grid.nx + ix]; }

  /// cell-sum x cell-area.
  [[nodiscard]] double mass() const;
  /// Scales to unit mass. Throws InvalidArgument for an all-zero grid.
  void normalize();
};

struct TubeDensityOptions {
  /// Cycle samples used for assembly; 0 picks one per grid cell of arc length.
  std::size_t n_samples = 0;
  /// Largest tolerated fraction of tube mass outside the grid.
  double max_outside = 1e-3;
};

/// Steady density pieced together from the tube cross-sections: every cell
/// takes the transverse Gaussian of its nearest point on the sampled cycle,
/// weighted by the local time per unit arc length. Returns a UnitMass grid.
/// Throws ExtentTooSmall.
DensityGrid assemble_tube_density(const TubeProfile& profile, const GridSpec& grid,
                                  const TubeDensityOptions& opts = {});

/// Bounding box of the profile orbit padded by pad_sigmas * max sigma.
GridSpec auto_extent(const TubeProfile& profile, std::size_t nx = 400, std::size_t ny = 400,
                     double pad_sigmas = 6.0);

/// P(r) = C exp(-lambda (r - r_c)^2 / (2 D)) on the grid, UnitMass.
/// Throws ExtentTooSmall, NonPositiveRate.
DensityGrid analytic_circle_density(double lambda, double r_c, double diffusion,
                                    const GridSpec& grid, double max_outside = 1e-3);

/// 2-D histogram of samples, UnitMass. Samples outside the extent are dropped.
DensityGrid empirical_density(std::span<const State> samples, const GridSpec& grid);

struct GridComparison {
  double l1 = 0.0;
  double l2_rel = 0.0;
  double max_abs = 0.0;
};

/// l1 = area * sum |a - b|, l2_rel = |a - b|_2 / |b|_2, max_abs = max |a - b|.
/// Throws GridMismatch.
GridComparison compare(const DensityGrid& a, const DensityGrid& b);

}  // namespace stochtube
