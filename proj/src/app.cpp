#include "stochtube/app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stochtube/config.hpp"
#include "stochtube/density.hpp"
#include "stochtube/error.hpp"
#include "stochtube/io.hpp"
#include "stochtube/langevin.hpp"
#include "stochtube/lyapunov.hpp"

namespace stochtube {
namespace {

namespace fs = std::filesystem;
using io::format_double;

/// Collects "key=value" pairs for the summary line.
class Summary {
 public:
  Summary& add(const std::string& key, const std::string& value) {
    if (!text_.empty()) text_ += ' ';
    text_ += key + '=' + value;
    return *this;
  }
  Summary& add(const std::string& key, double value) { return add(key, format_double(value)); }
  [[nodiscard]] const std::string& str() const { return text_; }

 private:
  std::string text_;
};

struct Context {
  const RunConfig& cfg;
  std::string prefix;
  io::Format format;
  bool image;

  [[nodiscard]] fs::path file(const std::string& stem) const {
    return prefix + "." + stem + (format == io::Format::Json ? ".json" : ".csv");
  }
};

void write_sidecar(const RunConfig& cfg, Task task, const std::string& prefix) {
  const fs::path path = prefix + ".resolved.cfg";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());
  out << "# resolved configuration; rerun with: stochtube " << task_name(task) << " --config "
      << path.filename().string() << "\n"
      << cfg.to_ini();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

CycleInfo detect_cycle(const RunConfig& cfg) {
  return find_limit_cycle(cfg.system(), cfg.cycle_start(), cfg.cycle_options());
}

TubeProfile build_profile(const RunConfig& cfg, const CycleInfo& cycle) {
  return tube_profile(cfg.system(), cycle, cfg.noise(), cfg.tube_options());
}

EnsembleConfig ensemble_from(const RunConfig& cfg, const CycleInfo& cycle) {
  EnsembleConfig e = cfg.ensemble();
  e.start = cycle.anchor;
  return e;
}

/// Grid for density output: the profile-derived extent when grid.auto is set
/// (so that all density sources for one config share a grid), else the
/// explicit extent.
GridSpec density_grid(const RunConfig& cfg, const TubeProfile& profile) {
  const GridSpec explicit_grid = cfg.grid();
  if (!cfg.flag("grid.auto")) return explicit_grid;
  return auto_extent(profile, explicit_grid.nx, explicit_grid.ny);
}

void run_cycle(const Context& ctx, Summary& s) {
  const CycleInfo cycle = detect_cycle(ctx.cfg);
  const Mat2 m = monodromy(ctx.cfg.system(), cycle);
  io::emit_trajectory(cycle.samples, ctx.file("trajectory"), ctx.format);
  s.add("system", std::string(system_name(ctx.cfg.system().kind)))
      .add("period", cycle.period)
      .add("anchor_x", cycle.anchor.x)
      .add("anchor_y", cycle.anchor.y)
      .add("floquet_multiplier", m.det());
}

void run_tube(const Context& ctx, Summary& s) {
  const CycleInfo cycle = detect_cycle(ctx.cfg);
  const TubeProfile profile = build_profile(ctx.cfg, cycle);
  io::emit_profile(profile, ctx.file("profile"), ctx.format);
  const auto [smin, smax] = std::minmax_element(profile.sigmas.begin(), profile.sigmas.end());
  s.add("system", std::string(system_name(ctx.cfg.system().kind)))
      .add("period", profile.period)
      .add("lambda1", profile.lambda1.back())
      .add("lambda2", profile.lambda2.back())
      .add("sigma_min", *smin)
      .add("sigma_max", *smax);
}

void run_langevin(const Context& ctx, Summary& s) {
  const CycleInfo cycle = detect_cycle(ctx.cfg);
  const EnsembleStats stats = simulate_ensemble(ensemble_from(ctx.cfg, cycle));
  io::emit_samples(stats.samples, ctx.file("samples"), ctx.format);
  s.add("system", std::string(system_name(ctx.cfg.system().kind)))
      .add("n_traj", static_cast<double>(stats.n_traj))
      .add("samples", static_cast<double>(stats.samples.size()))
      .add("radial_mean", stats.radial_mean)
      .add("radial_variance", stats.radial_variance)
      .add("var_x", stats.var_x)
      .add("var_y", stats.var_y);

  const long n_sections = ctx.cfg.integer("langevin.n_sections");
  if (n_sections < 0) throw ConfigError("langevin.n_sections", "must be >= 0");
  if (n_sections > 0) {
    const auto sections = section_statistics(stats.samples, cycle, static_cast<std::size_t>(n_sections));
    const TubeProfile profile = build_profile(ctx.cfg, cycle);
    const auto tube = tube_section_variance(profile, static_cast<std::size_t>(n_sections));
    io::emit_sections(sections, tube, ctx.file("sections"), ctx.format);
    double worst = 0.0;
    for (std::size_t k = 0; k < sections.size(); ++k) {
      worst = std::max(worst, std::abs(sections[k].variance / tube[k] - 1.0));
    }
    s.add("section_max_rel_dev", worst);
  }
}

void run_density(const Context& ctx, Summary& s) {
  const std::string& source = ctx.cfg.str("density.source");
  if (source != "tube" && source != "analytic" && source != "empirical") {
    throw ConfigError("density.source", "expected tube, analytic or empirical, got '" + source + "'");
  }
  const SystemSpec spec = ctx.cfg.system();
  if (source == "analytic" && spec.kind != SystemKind::HopfCircle) {
    throw ConfigError("density.source", "analytic density requires system.kind = hopf");
  }
  const long n_samples = ctx.cfg.integer("density.n_samples");
  if (n_samples < 0) throw ConfigError("density.n_samples", "must be >= 0");

  const CycleInfo cycle = detect_cycle(ctx.cfg);
  const TubeProfile profile = build_profile(ctx.cfg, cycle);
  const GridSpec grid = density_grid(ctx.cfg, profile);

  DensityGrid density;
  if (source == "tube") {
    TubeDensityOptions opts;
    opts.n_samples = static_cast<std::size_t>(n_samples);
    density = assemble_tube_density(profile, grid, opts);
  } else if (source == "analytic") {
    density = analytic_circle_density(spec.lambda, spec.r_c, ctx.cfg.noise().d(), grid);
  } else {
    const EnsembleStats stats = simulate_ensemble(ensemble_from(ctx.cfg, cycle));
    density = empirical_density(stats.samples, grid);
  }
  density.normalize();

  io::emit_grid(density, ctx.file("density"), ctx.format);
  if (ctx.image) io::emit_pgm(density, ctx.prefix + ".pgm");
  s.add("system", std::string(system_name(spec.kind)))
      .add("source", source)
      .add("nx", static_cast<double>(grid.nx))
      .add("ny", static_cast<double>(grid.ny))
      .add("mass", density.mass())
      .add("peak", *std::max_element(density.values.begin(), density.values.end()));
}

void run_compare(const Context& ctx, Summary& s) {
  const std::string& a = ctx.cfg.str("compare.a");
  const std::string& b = ctx.cfg.str("compare.b");
  if (a.empty()) throw ConfigError("compare.a", "path to the first grid is required");
  if (b.empty()) throw ConfigError("compare.b", "path to the second grid is required");
  const GridComparison c = compare(io::read_grid(a), io::read_grid(b));
  s.add("l1", c.l1).add("l2_rel", c.l2_rel).add("max_abs", c.max_abs);
}

void run_scales(const Context& ctx, Summary& s) {
  const double lambda = ctx.cfg.number("scales.lambda");
  const double diffusion = ctx.cfg.number("scales.diffusion");
  const double action = ctx.cfg.number("scales.action");
  const double hbar = ctx.cfg.number("scales.hbar");
  s.add("t_star", zaslavsky_time(lambda, action, hbar)).add("delta_p_min", delta_p_min(lambda, diffusion));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian noise tubes around planar limit cycles", "stochtube"};
  std::string task_arg;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_prefix;
  std::string format_arg;
  bool image = false;
  app.add_option("task", task_arg, "cycle | tube | langevin | density | compare | scales")->required();
  app.add_option("--config", config_path, "INI or JSON configuration file");
  app.add_option("--set", overrides, "override a configuration value (key=value), repeatable");
  app.add_option("--out", out_prefix, "output path prefix");
  app.add_option("--format", format_arg, "csv or json");
  app.add_flag("--image", image, "also write a P5 graymap of density grids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "stochtube: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const Task task = parse_task(task_arg);
    RunConfig cfg;
    if (!config_path.empty()) cfg.merge_file(config_path);
    for (const auto& o : overrides) cfg.set_override(o);
    if (!out_prefix.empty()) cfg.set("output.prefix", out_prefix);
    if (!format_arg.empty()) cfg.set("output.format", format_arg);
    if (image) cfg.set("output.image", "true");

    const Context ctx{cfg, cfg.str("output.prefix"), cfg.format(), cfg.flag("output.image")};
    if (ctx.prefix.empty()) throw ConfigError("output.prefix", "must not be empty");
    write_sidecar(cfg, task, ctx.prefix);

    Summary s;
    s.add("task", task_name(task));
    switch (task) {
      case Task::Cycle: run_cycle(ctx, s); break;
      case Task::Tube: run_tube(ctx, s); break;
      case Task::Langevin: run_langevin(ctx, s); break;
      case Task::Density: run_density(ctx, s); break;
      case Task::Compare: run_compare(ctx, s); break;
      case Task::Scales: run_scales(ctx, s); break;
    }
    out << s.str() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "stochtube: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "stochtube: " << e.what() << "\n";
    return e.kind() == ErrorKind::Io ? kExitIo : kExitNumerical;
  } catch (const std::exception& e) {
    err << "stochtube: internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace stochtube
