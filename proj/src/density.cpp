#include "stochtube/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "stochtube/error.hpp"
#include "stochtube/langevin.hpp"

namespace stochtube {
namespace {

double upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// Distance from p (inside the box) to the box boundary along unit direction u.
double exit_distance(const GridSpec& g, State p, State u) {
  double t = std::numeric_limits<double>::infinity();
  if (u.x > 0.0) t = std::min(t, (g.x_max - p.x) / u.x);
  if (u.x < 0.0) t = std::min(t, (g.x_min - p.x) / u.x);
  if (u.y > 0.0) t = std::min(t, (g.y_max - p.y) / u.y);
  if (u.y < 0.0) t = std::min(t, (g.y_min - p.y) / u.y);
  return t;
}

bool inside(const GridSpec& g, State p) {
  return p.x > g.x_min && p.x < g.x_max && p.y > g.y_min && p.y < g.y_max;
}

}  // namespace

void GridSpec::validate() const {
  if (nx == 0 || ny == 0) throw Error(ErrorKind::InvalidArgument, "grid resolution must be positive");
  if (!(x_max > x_min) || !(y_max > y_min)) {
    throw Error(ErrorKind::InvalidArgument, "grid extent must satisfy min < max");
  }
}

double DensityGrid::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_area();
}

void DensityGrid::normalize() {
  const double m = mass();
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "cannot normalize a grid with zero mass");
  const double inv = 1.0 / m;
  for (double& v : values) v *= inv;
  norm = Normalization::UnitMass;
}

GridSpec auto_extent(const TubeProfile& profile, std::size_t nx, std::size_t ny, double pad_sigmas) {
  if (profile.empty()) throw Error(ErrorKind::InvalidArgument, "empty tube profile");
  GridSpec g;
  g.x_min = g.y_min = std::numeric_limits<double>::infinity();
  g.x_max = g.y_max = -std::numeric_limits<double>::infinity();
  double max_sigma = 0.0;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const State& s = profile.states[k];
    g.x_min = std::min(g.x_min, s.x);
    g.x_max = std::max(g.x_max, s.x);
    g.y_min = std::min(g.y_min, s.y);
    g.y_max = std::max(g.y_max, s.y);
    max_sigma = std::max(max_sigma, profile.sigmas[k]);
  }
  const double pad = pad_sigmas * max_sigma;
  g.x_min -= pad;
  g.x_max += pad;
  g.y_min -= pad;
  g.y_max += pad;
  g.nx = nx;
  g.ny = ny;
  return g;
}

DensityGrid assemble_tube_density(const TubeProfile& profile, const GridSpec& grid,
                                  const TubeDensityOptions& opts) {
  grid.validate();
  if (profile.size() < 51) {
    throw Error(ErrorKind::InvalidArgument, "tube profile needs >= 50 samples over the period");
  }
  const std::size_t n_avail = profile.size() - 1;  // last sample closes the period

  std::size_t n = opts.n_samples;
  if (n == 0) {
    double perimeter = 0.0;
    for (std::size_t k = 0; k < n_avail; ++k) perimeter += norm(profile.states[k + 1] - profile.states[k]);
    const double cell = std::min(grid.dx(), grid.dy());
    n = static_cast<std::size_t>(std::ceil(perimeter / cell));
  }
  n = std::clamp<std::size_t>(n, 3, n_avail);

  std::vector<State> pts(n);
  std::vector<double> phase(n), sigma(n), t(n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j * n_avail) / n;
    pts[j] = profile.states[k];
    sigma[j] = profile.sigmas[k];
    t[j] = profile.times[k];
    phase[j] = t[j] / profile.period;
  }
  t[n] = profile.period;

  // Time spent per unit arc length around each vertex.
  std::vector<double> weight(n), seg_len(n);
  for (std::size_t j = 0; j < n; ++j) seg_len[j] = norm(pts[(j + 1) % n] - pts[j]);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jp = (j + n - 1) % n;
    const double dt_prev = t[jp + 1] - t[jp];
    const double dt_next = t[j + 1] - t[j];
    weight[j] = (dt_prev + dt_next) / (seg_len[jp] + seg_len[j]);
  }

  // Mass lost across the grid boundary, per vertex along its normal line.
  double lost = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const State d = pts[(j + 1) % n] - pts[(j + n - 1) % n];
    const double dl = norm(d);
    const State u = dl > 0.0 ? State{-d.y / dl, d.x / dl} : State{0.0, 1.0};
    double frac = 1.0;
    if (inside(grid, pts[j]) && sigma[j] > 0.0) {
      frac = upper_tail(exit_distance(grid, pts[j], u) / sigma[j]) +
             upper_tail(exit_distance(grid, pts[j], -u) / sigma[j]);
    }
    lost += frac * (t[j + 1] - t[j]);
  }
  lost /= profile.period;
  if (lost > opts.max_outside) {
    std::ostringstream msg;
    msg << "grid misses " << lost * 100.0 << "% of the tube mass";
    throw Error(ErrorKind::ExtentTooSmall, msg.str());
  }

  const CycleLocator loc(pts, phase);
  DensityGrid out(grid);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const CycleProjection pr = loc.project(grid.center(ix, iy));
      const std::size_t a = pr.segment;
      const std::size_t b = (a + 1) % n;
      const double s = (1.0 - pr.tau) * sigma[a] + pr.tau * sigma[b];
      const double w = (1.0 - pr.tau) * weight[a] + pr.tau * weight[b];
      if (!(s > 0.0)) continue;
      const double z = pr.offset / s;
      out.at(ix, iy) = w * inv_sqrt_2pi / s * std::exp(-0.5 * z * z);
    }
  }
  out.normalize();
  return out;
}

DensityGrid analytic_circle_density(double lambda, double r_c, double diffusion, const GridSpec& grid,
                                    double max_outside) {
  grid.validate();
  if (!(lambda > 0.0)) throw Error(ErrorKind::NonPositiveRate, "lambda must be > 0");
  if (!(diffusion > 0.0)) throw Error(ErrorKind::InvalidArgument, "D must be > 0");
  DensityGrid out(grid);
  const double k = lambda / (2.0 * diffusion);
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const State c = grid.center(ix, iy);
      const double dr = std::hypot(c.x, c.y) - r_c;
      out.at(ix, iy) = std::exp(-k * dr * dr);
    }
  }
  // Total planar mass of the unnormalized profile, closed form.
  const double s = std::sqrt(diffusion / lambda);
  const double total =
      2.0 * std::numbers::pi *
      (s * s * std::exp(-r_c * r_c / (2.0 * s * s)) +
       r_c * s * std::sqrt(std::numbers::pi / 2.0) * (1.0 + std::erf(r_c / (s * std::numbers::sqrt2))));
  const double outside = 1.0 - out.mass() / total;
  if (outside > max_outside) {
    std::ostringstream msg;
    msg << "grid misses " << outside * 100.0 << "% of the stationary mass";
    throw Error(ErrorKind::ExtentTooSmall, msg.str());
  }
  out.normalize();
  return out;
}

DensityGrid empirical_density(std::span<const State> samples, const GridSpec& grid) {
  grid.validate();
  DensityGrid out(grid);
  const double dx = grid.dx();
  const double dy = grid.dy();
  for (const State& p : samples) {
    if (!(p.x >= grid.x_min && p.x < grid.x_max && p.y >= grid.y_min && p.y < grid.y_max)) continue;
    const auto ix = std::min(grid.nx - 1, static_cast<std::size_t>((p.x - grid.x_min) / dx));
    const auto iy = std::min(grid.ny - 1, static_cast<std::size_t>((p.y - grid.y_min) / dy));
    out.at(ix, iy) += 1.0;
  }
  out.normalize();
  return out;
}

GridComparison compare(const DensityGrid& a, const DensityGrid& b) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
    throw Error(ErrorKind::GridMismatch, "grids differ in extent or resolution");
  }
  GridComparison c;
  double sum_abs = 0.0, sum_sq = 0.0, ref_sq = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    sum_abs += std::abs(d);
    sum_sq += d * d;
    ref_sq += b.values[i] * b.values[i];
    c.max_abs = std::max(c.max_abs, std::abs(d));
  }
  c.l1 = sum_abs * a.grid.cell_area();
  c.l2_rel = ref_sq > 0.0 ? std::sqrt(sum_sq / ref_sq) : (sum_sq > 0.0 ? INFINITY : 0.0);
  return c;
}

}  // namespace stochtube
