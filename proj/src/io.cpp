#include "stochtube/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "stochtube/error.hpp"

namespace stochtube::io {
namespace {

using nlohmann::json;

[[noreturn]] void io_fail(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorKind::Io, what + ": " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) io_fail(path, "cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) io_fail(path, "write failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(std::string_view s, const std::filesystem::path& path) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    io_fail(path, "malformed number '" + std::string(s) + "'");
  }
  return v;
}

/// Table of named numeric columns written as CSV with a "# a,b,c" header.
struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;

  void write(const std::filesystem::path& path, Format format) const {
    const std::size_t rows = cols.empty() ? 0 : cols.front().size();
    if (format == Format::Json) {
      json j = json::object();
      for (std::size_t c = 0; c < names.size(); ++c) {
        json arr = json::array();
        for (double v : cols[c]) arr.push_back(std::isfinite(v) ? json(v) : json(nullptr));
        j[names[c]] = std::move(arr);
      }
      write_text(path, j.dump() + "\n");
      return;
    }
    std::string text = "# ";
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (c) text += ',';
      text += names[c];
    }
    text += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) text += ',';
        text += format_double(cols[c][r]);
      }
      text += '\n';
    }
    write_text(path, text);
  }
};

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void emit_grid(const DensityGrid& grid, const std::filesystem::path& path, Format format) {
  const GridSpec& g = grid.grid;
  if (format == Format::Json) {
    json j;
    j["extent"] = {g.x_min, g.x_max, g.y_min, g.y_max};
    j["nx"] = g.nx;
    j["ny"] = g.ny;
    j["values"] = grid.values;
    write_text(path, j.dump() + "\n");
    return;
  }
  std::string text = "# x_min x_max y_min y_max nx ny\n# ";
  text += format_double(g.x_min) + ' ' + format_double(g.x_max) + ' ' + format_double(g.y_min) + ' ' +
          format_double(g.y_max) + ' ' + std::to_string(g.nx) + ' ' + std::to_string(g.ny) + '\n';
  for (std::size_t iy = 0; iy < g.ny; ++iy) {
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      if (ix) text += ',';
      text += format_double(grid.at(ix, iy));
    }
    text += '\n';
  }
  write_text(path, text);
}

DensityGrid read_grid(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  if (path.extension() == ".json") {
    json j;
    try {
      j = json::parse(text);
      GridSpec g;
      const auto ext = j.at("extent").get<std::vector<double>>();
      if (ext.size() != 4) io_fail(path, "extent must have 4 entries");
      g.x_min = ext[0];
      g.x_max = ext[1];
      g.y_min = ext[2];
      g.y_max = ext[3];
      g.nx = j.at("nx").get<std::size_t>();
      g.ny = j.at("ny").get<std::size_t>();
      DensityGrid grid(g);
      grid.values = j.at("values").get<std::vector<double>>();
      if (grid.values.size() != g.nx * g.ny) io_fail(path, "value count does not match nx*ny");
      return grid;
    } catch (const json::exception& e) {
      io_fail(path, std::string("malformed grid JSON (") + e.what() + ")");
    }
  }

  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line.rfind("# x_min", 0) != 0) io_fail(path, "missing grid header");
  std::getline(in, line);
  if (line.rfind("# ", 0) != 0) io_fail(path, "missing grid extent line");
  std::istringstream hdr(line.substr(2));
  std::string tok[6];
  for (auto& t : tok) {
    if (!(hdr >> t)) io_fail(path, "short grid extent line");
  }
  GridSpec g;
  g.x_min = parse_double(tok[0], path);
  g.x_max = parse_double(tok[1], path);
  g.y_min = parse_double(tok[2], path);
  g.y_max = parse_double(tok[3], path);
  g.nx = static_cast<std::size_t>(parse_double(tok[4], path));
  g.ny = static_cast<std::size_t>(parse_double(tok[5], path));
  DensityGrid grid(g);
  for (std::size_t iy = 0; iy < g.ny; ++iy) {
    if (!std::getline(in, line)) io_fail(path, "too few grid rows");
    std::string_view row(line);
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const std::size_t comma = row.find(',');
      if ((comma == std::string_view::npos) != (ix + 1 == g.nx)) io_fail(path, "wrong number of grid columns");
      grid.at(ix, iy) = parse_double(row.substr(0, comma), path);
      if (comma != std::string_view::npos) row.remove_prefix(comma + 1);
    }
  }
  return grid;
}

void emit_pgm(const DensityGrid& grid, const std::filesystem::path& path) {
  const GridSpec& g = grid.grid;
  const double vmax = grid.values.empty() ? 0.0 : *std::max_element(grid.values.begin(), grid.values.end());
  std::string data = "P5\n" + std::to_string(g.nx) + ' ' + std::to_string(g.ny) + "\n255\n";
  data.reserve(data.size() + g.nx * g.ny);
  for (std::size_t row = 0; row < g.ny; ++row) {
    const std::size_t iy = g.ny - 1 - row;
    for (std::size_t ix = 0; ix < g.nx; ++ix) {
      const double v = vmax > 0.0 ? std::clamp(grid.at(ix, iy) / vmax, 0.0, 1.0) : 0.0;
      data.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
  write_text(path, data);
}

void emit_profile(const TubeProfile& profile, const std::filesystem::path& path, Format format) {
  if (profile.empty()) throw Error(ErrorKind::InvalidArgument, "refusing to write an empty tube profile");
  Table t;
  t.names = {"t", "x", "y", "sigma", "lambda1", "lambda2", "nx_eigvec", "ny_eigvec"};
  t.cols.resize(t.names.size());
  for (std::size_t k = 0; k < profile.size(); ++k) {
    t.cols[0].push_back(profile.times[k]);
    t.cols[1].push_back(profile.states[k].x);
    t.cols[2].push_back(profile.states[k].y);
    t.cols[3].push_back(profile.sigmas[k]);
    t.cols[4].push_back(profile.lambda1[k]);
    t.cols[5].push_back(profile.lambda2[k]);
    t.cols[6].push_back(profile.transverse_dirs[k].x);
    t.cols[7].push_back(profile.transverse_dirs[k].y);
  }
  t.write(path, format);
}

void emit_trajectory(const Trajectory& traj, const std::filesystem::path& path, Format format) {
  Table t;
  t.names = {"t", "x", "y"};
  t.cols.resize(3);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    t.cols[0].push_back(traj.times[k]);
    t.cols[1].push_back(traj.states[k].x);
    t.cols[2].push_back(traj.states[k].y);
  }
  t.write(path, format);
}

void emit_samples(std::span<const State> samples, const std::filesystem::path& path, Format format) {
  Table t;
  t.names = {"x", "y"};
  t.cols.resize(2);
  t.cols[0].reserve(samples.size());
  t.cols[1].reserve(samples.size());
  for (const State& s : samples) {
    t.cols[0].push_back(s.x);
    t.cols[1].push_back(s.y);
  }
  t.write(path, format);
}

void emit_sections(std::span<const SectionStat> sections, std::span<const double> tube_variance,
                   const std::filesystem::path& path, Format format) {
  Table t;
  t.names = {"phase_begin", "phase_end", "count", "mean", "variance", "tube_variance"};
  t.cols.resize(t.names.size());
  for (std::size_t s = 0; s < sections.size(); ++s) {
    t.cols[0].push_back(sections[s].phase_begin);
    t.cols[1].push_back(sections[s].phase_end);
    t.cols[2].push_back(static_cast<double>(sections[s].count));
    t.cols[3].push_back(sections[s].mean);
    t.cols[4].push_back(sections[s].variance);
    t.cols[5].push_back(s < tube_variance.size() ? tube_variance[s] : NAN);
  }
  t.write(path, format);
}

}  // namespace stochtube::io
