#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "stochtube/density.hpp"
#include "stochtube/integrate.hpp"
#include "stochtube/langevin.hpp"
#include "stochtube/lyapunov.hpp"

namespace stochtube::io {

enum class Format { Csv, Json };

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// CSV: "# x_min x_max y_min y_max nx ny", a comment line with those values,
/// then ny rows of nx values (y outer, x inner). JSON: {extent, nx, ny, values}.
/// Throws Error(Io) naming the path.
void emit_grid(const DensityGrid& grid, const std::filesystem::path& path, Format format);

/// Reads a grid written by emit_grid (either format, chosen by extension).
DensityGrid read_grid(const std::filesystem::path& path);

/// 8-bit binary portable graymap, top row = y_max, max value -> 255.
void emit_pgm(const DensityGrid& grid, const std::filesystem::path& path);

/// Columns t, x, y, sigma, lambda1, lambda2, nx_eigvec, ny_eigvec.
/// Throws InvalidArgument for an empty profile, Io on write failure.
void emit_profile(const TubeProfile& profile, const std::filesystem::path& path, Format format);

/// Columns t, x, y.
void emit_trajectory(const Trajectory& traj, const std::filesystem::path& path, Format format);

/// Columns x, y; one row per retained ensemble sample.
void emit_samples(std::span<const State> samples, const std::filesystem::path& path, Format format);

/// Columns phase_begin, phase_end, count, mean, variance, tube_variance.
void emit_sections(std::span<const SectionStat> sections, std::span<const double> tube_variance,
                   const std::filesystem::path& path, Format format);

}  // namespace stochtube::io
