#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stochtube/density.hpp"
#include "stochtube/dynamics.hpp"
#include "stochtube/integrate.hpp"
#include "stochtube/io.hpp"
#include "stochtube/langevin.hpp"
#include "stochtube/lyapunov.hpp"

namespace stochtube {

/// Bad configuration input; `key` names the offending entry when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class Task { Cycle, Tube, Langevin, Density, Compare, Scales };

Task parse_task(const std::string& name);
std::string task_name(Task task);

/// Fully resolved run configuration: every known key carries a value, either
/// its default or the last assignment from a file or override.
///
/// Files are INI-style ("[section]" headers, "key = value" lines, '#'/';'
/// comments) or JSON (nested objects or dotted keys). Keys are addressed as
/// "section.key"; unknown keys are rejected.
class RunConfig {
 public:
  RunConfig();

  void merge_file(const std::filesystem::path& path);
  void merge_ini(const std::string& text, const std::string& source = "<ini>");
  void merge_json(const std::string& text, const std::string& source = "<json>");
  /// "key=value" form used by --set.
  void set_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  [[nodiscard]] const std::string& str(const std::string& key) const;
  [[nodiscard]] double number(const std::string& key) const;
  [[nodiscard]] long integer(const std::string& key) const;
  [[nodiscard]] bool flag(const std::string& key) const;

  /// INI text recording every resolved value, grouped by section.
  [[nodiscard]] std::string to_ini() const;

  [[nodiscard]] SystemSpec system() const;
  [[nodiscard]] NoiseSpec noise() const;
  [[nodiscard]] double dt() const;
  [[nodiscard]] State cycle_start() const;
  [[nodiscard]] CycleOptions cycle_options() const;
  [[nodiscard]] TubeOptions tube_options() const;
  /// Ensemble settings; `start` is filled in by the caller.
  [[nodiscard]] EnsembleConfig ensemble() const;
  [[nodiscard]] GridSpec grid() const;
  [[nodiscard]] io::Format format() const;

  static const std::vector<std::pair<std::string, std::string>>& schema();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace stochtube
