#ifndef XYENT_RUN_CONFIG_HPP
#define XYENT_RUN_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xyent/model.hpp"

namespace xyent {

enum class GridKind { Linear, GeometricAboutCritical };
enum class Format { Csv, Json };

/// Parameters shared by all commands. Unset fields fall back to
/// command-specific defaults, so a command can tell "not given" from a value.
struct RunConfig {
  std::vector<double> gamma;
  std::vector<ChainSize> sizes;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  std::optional<int> grid_points;
  std::optional<GridKind> grid_kind;
  std::optional<int> r_max;
  std::optional<double> step;
  std::optional<double> threshold;
  std::optional<double> lambda_0;
  std::optional<std::string> output_path;
  std::optional<Format> format;
  std::optional<unsigned> threads;
};

/// Keys accepted in config files and as flag overrides.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws BadConfig for unknown keys or
/// unparsable values.
void set_key(RunConfig& config, const std::string& key, const std::string& value);

/// `key = value` lines; `#` starts a comment; blank lines are ignored.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Applies flag values over a config, later keys winning.
void apply_overrides(RunConfig& config, const std::map<std::string, std::string>& flags);

/// Effective configuration as `key = value` lines (unset keys omitted), in
/// the order of config_keys().
std::vector<std::string> echo(const RunConfig& config);

std::string to_string(GridKind kind);
std::string to_string(Format format);

/// "inf" or an odd integer.
ChainSize parse_size(const std::string& text);

/// Grid of couplings from lambda_min/lambda_max/grid_points/grid_kind. For
/// geometric-about-critical, lambda_min and lambda_max bound |lambda - 1| and
/// grid_points counts points per side.
std::vector<double> lambda_grid(const RunConfig& config, double default_min,
                                double default_max, int default_points);

}  // namespace xyent

#endif
