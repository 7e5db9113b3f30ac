#include "stochtube/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stochtube {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Task parse_task(const std::string& name) {
  if (name == "cycle") return Task::Cycle;
  if (name == "tube") return Task::Tube;
  if (name == "langevin") return Task::Langevin;
  if (name == "density") return Task::Density;
  if (name == "compare") return Task::Compare;
  if (name == "scales") return Task::Scales;
  throw ConfigError("task", "unknown task '" + name + "'");
}

std::string task_name(Task task) {
  switch (task) {
    case Task::Cycle: return "cycle";
    case Task::Tube: return "tube";
    case Task::Langevin: return "langevin";
    case Task::Density: return "density";
    case Task::Compare: return "compare";
    case Task::Scales: return "scales";
  }
  return "unknown";
}

const std::vector<std::pair<std::string, std::string>>& RunConfig::schema() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"system.kind", "hopf"},
      {"system.lambda", "1"},
      {"system.r_c", "1"},
      {"system.omega", "1"},
      {"system.mu", "0.2"},
      {"system.b", "3"},
      {"system.omega0", "1"},
      {"noise.two_d", "0.1"},
      {"integrate.dt", "0.001"},
      {"cycle.x0", "0.1"},
      {"cycle.y0", "0"},
      {"cycle.transient", "100"},
      {"cycle.tol_cycle", "1e-8"},
      {"tube.n_periods", "10"},
      {"tube.tol_periodic", "0.01"},
      {"langevin.n_traj", "10000"},
      {"langevin.t_end", "60"},
      {"langevin.dt", "0.001"},
      {"langevin.burn_in", "auto"},
      {"langevin.seed", "1"},
      {"langevin.thin", "0"},
      {"langevin.n_sections", "0"},
      {"density.source", "tube"},
      {"density.n_samples", "0"},
      {"grid.auto", "true"},
      {"grid.x_min", "-2"},
      {"grid.x_max", "2"},
      {"grid.y_min", "-2"},
      {"grid.y_max", "2"},
      {"grid.nx", "400"},
      {"grid.ny", "400"},
      {"compare.a", ""},
      {"compare.b", ""},
      {"scales.lambda", "1"},
      {"scales.diffusion", "0.05"},
      {"scales.action", "1"},
      {"scales.hbar", "1"},
      {"output.prefix", "stochtube"},
      {"output.format", "csv"},
      {"output.image", "false"},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& [k, v] : schema()) values_[k] = v;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "unknown configuration key");
  it->second = value;
}

void RunConfig::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(trim(assignment), "override must have the form key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::merge_ini(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    std::string s = trim(line.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        throw ConfigError("", source + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(s.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    set(key, trim(s.substr(eq + 1)));
  }
}

void RunConfig::merge_json(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("", source + ": malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw ConfigError("", source + ": top level must be an object");
  auto visit = [this](auto&& self, const nlohmann::json& node, const std::string& prefix) -> void {
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      const auto& v = it.value();
      if (v.is_object()) self(self, v, key);
      else if (v.is_string()) set(key, v.get<std::string>());
      else if (v.is_boolean()) set(key, v.get<bool>() ? "true" : "false");
      else if (v.is_number_integer()) set(key, std::to_string(v.get<long long>()));
      else if (v.is_number()) set(key, io::format_double(v.get<double>()));
      else throw ConfigError(key, "unsupported JSON value type");
    }
  };
  visit(visit, j, "");
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") merge_json(ss.str(), path.string());
  else merge_ini(ss.str(), path.string());
}

const std::string& RunConfig::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "unknown configuration key");
  return it->second;
}

double RunConfig::number(const std::string& key) const {
  const std::string& s = str(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a finite number, got '" + s + "'");
  }
  return v;
}

long RunConfig::integer(const std::string& key) const {
  const std::string& s = str(key);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(key, "expected an integer, got '" + s + "'");
  }
  return v;
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& s = str(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key, "expected true/false, got '" + s + "'");
}

std::string RunConfig::to_ini() const {
  std::string out;
  std::string section;
  for (const auto& [key, def] : schema()) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out += '\n';
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + values_.at(key) + "\n";
  }
  return out;
}

namespace {

double positive(const RunConfig& c, const std::string& key) {
  const double v = c.number(key);
  if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  return v;
}

}  // namespace

SystemSpec RunConfig::system() const {
  const std::string& kind = str("system.kind");
  SystemSpec s;
  if (kind == "hopf") {
    s = SystemSpec::hopf(positive(*this, "system.lambda"), positive(*this, "system.r_c"),
                         number("system.omega"));
    if (s.omega == 0.0) throw ConfigError("system.omega", "must be nonzero");
  } else if (kind == "vdp") {
    s = SystemSpec::van_der_pol(positive(*this, "system.mu"), positive(*this, "system.b"),
                                positive(*this, "system.omega0"));
  } else if (kind == "rayleigh") {
    s = SystemSpec::rayleigh(positive(*this, "system.mu"), positive(*this, "system.b"),
                             positive(*this, "system.omega0"));
  } else {
    throw ConfigError("system.kind", "expected hopf, vdp or rayleigh, got '" + kind + "'");
  }
  return s;
}

NoiseSpec RunConfig::noise() const {
  const double v = number("noise.two_d");
  if (!(v >= 0.0)) throw ConfigError("noise.two_d", "must be >= 0");
  return NoiseSpec{v};
}

double RunConfig::dt() const { return positive(*this, "integrate.dt"); }

State RunConfig::cycle_start() const { return {number("cycle.x0"), number("cycle.y0")}; }

CycleOptions RunConfig::cycle_options() const {
  CycleOptions o;
  o.dt = dt();
  o.transient = number("cycle.transient");
  if (!(o.transient >= 0.0)) throw ConfigError("cycle.transient", "must be >= 0");
  o.tol_cycle = positive(*this, "cycle.tol_cycle");
  return o;
}

TubeOptions RunConfig::tube_options() const {
  TubeOptions o;
  const long n = integer("tube.n_periods");
  if (n < 2) throw ConfigError("tube.n_periods", "must be >= 2");
  o.n_periods = static_cast<int>(n);
  o.tol_periodic = positive(*this, "tube.tol_periodic");
  return o;
}

EnsembleConfig RunConfig::ensemble() const {
  EnsembleConfig e;
  const long n = integer("langevin.n_traj");
  if (n < 1) throw ConfigError("langevin.n_traj", "must be >= 1");
  e.n_traj = static_cast<std::size_t>(n);
  e.t_end = positive(*this, "langevin.t_end");
  e.dt = positive(*this, "langevin.dt");
  if (e.dt > e.t_end) throw ConfigError("langevin.dt", "must not exceed langevin.t_end");
  if (str("langevin.burn_in") != "auto") {
    const double b = number("langevin.burn_in");
    if (!(b >= 0.0) || !(b < e.t_end)) throw ConfigError("langevin.burn_in", "must satisfy 0 <= burn_in < t_end");
    e.burn_in = b;
  }
  const long seed = integer("langevin.seed");
  if (seed < 0) throw ConfigError("langevin.seed", "must be >= 0");
  e.seed = static_cast<std::uint64_t>(seed);
  e.thin = number("langevin.thin");
  if (!(e.thin >= 0.0)) throw ConfigError("langevin.thin", "must be >= 0");
  e.flow = system();
  e.noise = noise();
  return e;
}

GridSpec RunConfig::grid() const {
  GridSpec g;
  g.x_min = number("grid.x_min");
  g.x_max = number("grid.x_max");
  g.y_min = number("grid.y_min");
  g.y_max = number("grid.y_max");
  if (!(g.x_max > g.x_min)) throw ConfigError("grid.x_max", "must exceed grid.x_min");
  if (!(g.y_max > g.y_min)) throw ConfigError("grid.y_max", "must exceed grid.y_min");
  const long nx = integer("grid.nx");
  const long ny = integer("grid.ny");
  if (nx < 1) throw ConfigError("grid.nx", "must be >= 1");
  if (ny < 1) throw ConfigError("grid.ny", "must be >= 1");
  g.nx = static_cast<std::size_t>(nx);
  g.ny = static_cast<std::size_t>(ny);
  return g;
}

io::Format RunConfig::format() const {
  const std::string& f = str("output.format");
  if (f == "csv") return io::Format::Csv;
  if (f == "json") return io::Format::Json;
  throw ConfigError("output.format", "expected csv or json, got '" + f + "'");
}

}  // namespace stochtube
