#include "xyent/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace xyent {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::BadConfig, key + ": not a number: '" + text + "'");
}

long to_long(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::BadConfig, key + ": not an integer: '" + text + "'");
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "gamma",     "sizes",  "lambda_min", "lambda_max", "grid_points",
      "grid_kind", "r_max",  "step",       "threshold",  "lambda_0",
      "output_path", "format", "threads"};
  return keys;
}

ChainSize parse_size(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf") return Infinite{};
  const long n = to_long("sizes", t);
  RawParams raw{n, 1.0, 0.0};
  validate(raw);
  return FiniteOdd{n};
}

void set_key(RunConfig& c, const std::string& key, const std::string& raw_value) {
  const std::string v = trim(raw_value);
  if (key == "gamma") {
    c.gamma.clear();
    for (const auto& item : split_list(v)) c.gamma.push_back(to_double(key, item));
    if (c.gamma.empty()) throw Error(ErrorCode::BadConfig, "gamma: empty list");
  } else if (key == "sizes") {
    c.sizes.clear();
    for (const auto& item : split_list(v)) c.sizes.push_back(parse_size(item));
    if (c.sizes.empty()) throw Error(ErrorCode::BadConfig, "sizes: empty list");
  } else if (key == "lambda_min") {
    c.lambda_min = to_double(key, v);
  } else if (key == "lambda_max") {
    c.lambda_max = to_double(key, v);
  } else if (key == "grid_points") {
    const long n = to_long(key, v);
    if (n < 1) throw Error(ErrorCode::BadConfig, "grid_points must be >= 1");
    c.grid_points = static_cast<int>(n);
  } else if (key == "grid_kind") {
    if (v == "linear") c.grid_kind = GridKind::Linear;
    else if (v == "geometric-about-critical") c.grid_kind = GridKind::GeometricAboutCritical;
    else throw Error(ErrorCode::BadConfig, "grid_kind: expected linear|geometric-about-critical");
  } else if (key == "r_max") {
    const long r = to_long(key, v);
    if (r < 1) throw Error(ErrorCode::BadConfig, "r_max must be >= 1");
    c.r_max = static_cast<int>(r);
  } else if (key == "step") {
    c.step = to_double(key, v);
    if (!(*c.step > 0.0)) throw Error(ErrorCode::BadConfig, "step must be positive");
  } else if (key == "threshold") {
    c.threshold = to_double(key, v);
  } else if (key == "lambda_0") {
    c.lambda_0 = to_double(key, v);
  } else if (key == "output_path") {
    c.output_path = v;
  } else if (key == "format") {
    if (v == "csv") c.format = Format::Csv;
    else if (v == "json") c.format = Format::Json;
    else throw Error(ErrorCode::BadConfig, "format: expected csv|json");
  } else if (key == "threads") {
    const long t = to_long(key, v);
    if (t < 1) throw Error(ErrorCode::BadConfig, "threads must be >= 1");
    c.threads = static_cast<unsigned>(t);
  } else {
    throw Error(ErrorCode::BadConfig, "unknown key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::BadConfig,
                  "line " + std::to_string(number) + ": expected key = value");
    set_key(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_overrides(RunConfig& config, const std::map<std::string, std::string>& flags) {
  for (const auto& [key, value] : flags) set_key(config, key, value);
}

std::string to_string(GridKind kind) {
  return kind == GridKind::Linear ? "linear" : "geometric-about-critical";
}

std::string to_string(Format format) { return format == Format::Csv ? "csv" : "json"; }

std::vector<std::string> echo(const RunConfig& c) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& k, const std::string& v) { out.push_back(k + " = " + v); };
  if (!c.gamma.empty()) {
    std::string s;
    for (double g : c.gamma) s += (s.empty() ? "" : ",") + format_double(g);
    add("gamma", s);
  }
  if (!c.sizes.empty()) {
    std::string s;
    for (const auto& n : c.sizes) s += (s.empty() ? "" : ",") + to_string(n);
    add("sizes", s);
  }
  if (c.lambda_min) add("lambda_min", format_double(*c.lambda_min));
  if (c.lambda_max) add("lambda_max", format_double(*c.lambda_max));
  if (c.grid_points) add("grid_points", std::to_string(*c.grid_points));
  if (c.grid_kind) add("grid_kind", to_string(*c.grid_kind));
  if (c.r_max) add("r_max", std::to_string(*c.r_max));
  if (c.step) add("step", format_double(*c.step));
  if (c.threshold) add("threshold", format_double(*c.threshold));
  if (c.lambda_0) add("lambda_0", format_double(*c.lambda_0));
  if (c.output_path) add("output_path", *c.output_path);
  if (c.format) add("format", to_string(*c.format));
  if (c.threads) add("threads", std::to_string(*c.threads));
  return out;
}

std::vector<double> lambda_grid(const RunConfig& c, double default_min, double default_max,
                                int default_points) {
  const int points = c.grid_points.value_or(default_points);
  const GridKind kind = c.grid_kind.value_or(GridKind::Linear);
  std::vector<double> grid;
  if (kind == GridKind::Linear) {
    const double lo = c.lambda_min.value_or(default_min);
    const double hi = c.lambda_max.value_or(points == 1 ? lo : default_max);
    if (points > 1 && !(hi > lo))
      throw Error(ErrorCode::BadConfig, "lambda_max must exceed lambda_min");
    for (int i = 0; i < points; ++i)
      grid.push_back(points == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(points - 1));
  } else {
    const double lo = c.lambda_min.value_or(1e-4);
    const double hi = c.lambda_max.value_or(0.5);
    if (!(lo > 0.0) || !(hi >= lo) || hi > 1.0)
      throw Error(ErrorCode::BadConfig,
                  "geometric grid needs 0 < lambda_min <= lambda_max <= 1 (distances from 1)");
    for (int i = 0; i < points; ++i) {
      const double t = points == 1 ? 0.0 : i / static_cast<double>(points - 1);
      const double d = lo * std::pow(hi / lo, t);
      grid.push_back(1.0 - d);
      grid.push_back(1.0 + d);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  for (double l : grid)
    if (l < 0.0) throw Error(ErrorCode::NegativeLambda, "grid reaches lambda < 0");
  return grid;
}

}  // namespace xyent
