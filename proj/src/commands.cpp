#include "xyent/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "xyent/ed_oracle.hpp"
#include "xyent/entanglement.hpp"
#include "xyent/parallel.hpp"
#include "xyent/scaling.hpp"

#ifndef XYENT_VERSION
#define XYENT_VERSION "0.0.0"
#endif

namespace xyent {

namespace {

using nlohmann::json;

unsigned thread_count(const RunConfig& c) {
  if (c.threads) return *c.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Sort key for chain sizes: finite ascending, infinite last.
long size_key(const ChainSize& n) {
  if (const auto* f = std::get_if<FiniteOdd>(&n)) return f->n;
  return std::numeric_limits<long>::max();
}

std::vector<ChainSize> sorted_sizes(std::vector<ChainSize> sizes) {
  std::sort(sizes.begin(), sizes.end(),
            [](const ChainSize& a, const ChainSize& b) { return size_key(a) < size_key(b); });
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

json cell_to_json(const std::string& s) {
  if (s == "inf" || s == "nan" || s == "-inf" || s.empty()) return s;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) {
      if (s.find_first_of(".eE") == std::string::npos && std::abs(v) < 9e15)
        return static_cast<long long>(v);
      return v;
    }
  } catch (const std::exception&) {
  }
  return s;
}

double parse_cell(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

std::string json_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_number(v.get<double>());
  return v.dump();
}

json fit_json(const LinearFit& f) {
  return {{"slope", f.slope},
          {"slope_stderr", f.slope_stderr},
          {"intercept", f.intercept},
          {"residual", f.residual},
          {"points", f.points}};
}

json collapse_json(const CollapseResult& c, double nu) {
  return {{"nu", nu},
          {"residual", c.residual},
          {"rms_spread", c.rms_spread},
          {"dynamic_range", c.dynamic_range},
          {"spread_over_range", c.dynamic_range > 0.0 ? c.rms_spread / c.dynamic_range : 0.0},
          {"overlap", {c.overlap_lo, c.overlap_hi}}};
}

// Round-trip through 12 significant digits so JSON output matches CSV.
double rounded(double v) { return std::isfinite(v) ? std::stod(format_number(v)) : v; }

json round_all(const json& j) {
  if (j.is_number_float()) return rounded(j.get<double>());
  if (j.is_object() || j.is_array()) {
    json out = j;
    for (auto& el : out) el = round_all(el);
    return out;
  }
  return j;
}

Provenance make_provenance(const std::string& command, const RunConfig& config) {
  return {command, utc_timestamp(), echo(config), {}};
}

}  // namespace

std::string version() { return XYENT_VERSION; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorCode::MissingSeries, "no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string render_csv(const Table& table, const Provenance& meta) {
  std::ostringstream os;
  os << "# xyent " << version() << " " << meta.command << "\n";
  os << "# generated " << meta.timestamp << "\n";
  for (const auto& line : meta.config) os << "# config " << line << "\n";
  for (const auto& line : meta.results) os << "# result " << line << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

std::string render_json(const Table& table, const Provenance& meta) {
  json doc;
  doc["meta"] = {{"program", "xyent"},
                 {"version", version()},
                 {"command", meta.command},
                 {"generated", meta.timestamp},
                 {"config", meta.config},
                 {"results", meta.results}};
  doc["columns"] = table.columns;
  json rows = json::array();
  for (const auto& row : table.rows) {
    json r = json::array();
    for (const auto& cell : row) r.push_back(cell_to_json(cell));
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(1) + "\n";
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingSeries, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  Table t;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json doc = json::parse(text);
    t.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& r : doc.at("rows")) {
      std::vector<std::string> row;
      for (const auto& cell : r) row.push_back(json_cell(cell));
      t.rows.push_back(std::move(row));
    }
    return t;
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (t.columns.empty()) t.columns = std::move(cells);
    else t.rows.push_back(std::move(cells));
  }
  if (t.columns.empty()) throw Error(ErrorCode::MissingSeries, path + " has no table");
  return t;
}

void write_output(const std::string& path, const std::string& content,
                  std::ostream& stdout_stream) {
  if (path == "-") {
    stdout_stream << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (out) out << content;
  out.close();
  if (!out) {
    std::remove(path.c_str());
    throw Error(ErrorCode::BadConfig, "cannot write " + path);
  }
}

// ---------------------------------------------------------------- sweep

Table sweep_table(const RunConfig& config) {
  const std::vector<ChainSize> sizes = sorted_sizes(
      config.sizes.empty()
          ? std::vector<ChainSize>{FiniteOdd{11}, FiniteOdd{41}, FiniteOdd{101},
                                   FiniteOdd{251}, FiniteOdd{401}, Infinite{}}
          : config.sizes);
  const std::vector<double> gammas =
      sorted_unique(config.gamma.empty() ? std::vector<double>{1.0} : config.gamma);
  const std::vector<double> grid = lambda_grid(config, 0.0, 2.0, 201);
  const int r_max = config.r_max.value_or(3);
  const double step = config.step.value_or(kDefaultStep);

  struct Task {
    ChainSize n;
    double gamma;
    double lambda;
  };
  std::vector<Task> tasks;
  for (const auto& n : sizes)
    for (double g : gammas) {
      make_params(n, g, 0.0);  // validate before any work starts
      if (const auto* f = std::get_if<FiniteOdd>(&n); f && 2L * r_max >= f->n)
        throw Error(ErrorCode::RMaxTooLarge, "r_max = " + std::to_string(r_max) +
                                                 " needs N > " + std::to_string(2 * r_max));
      for (double l : grid) tasks.push_back({n, g, l});
    }

  Table t;
  t.columns = {"N", "gamma", "lambda", "mz"};
  for (const char* prefix : {"gxx_r", "gyy_r", "gzz_r"})
    for (int r = 1; r <= r_max; ++r) t.columns.push_back(prefix + std::to_string(r));
  for (int r = 1; r <= r_max; ++r) t.columns.push_back("C_" + std::to_string(r));
  t.columns.push_back("dC_1");
  t.columns.push_back("d2C_2");

  t.rows = parallel_map(tasks.size(), thread_count(config), [&](std::size_t i) {
    const Task& task = tasks[i];
    const ModelParams p = make_params(task.n, task.gamma, task.lambda);
    const CorrelatorSet corr = correlators(p, r_max);
    std::vector<std::string> row{to_string(task.n), format_number(task.gamma),
                                 format_number(task.lambda), format_number(corr.mz)};
    for (const auto* column : {&corr.gxx, &corr.gyy, &corr.gzz})
      for (double v : *column) row.push_back(format_number(v));
    for (int r = 1; r <= r_max; ++r)
      row.push_back(format_number(concurrence(assemble_rdm(corr, r))));
    const double h1 = effective_step(task.n, task.lambda, step, 1);
    const double h2 = effective_step(task.n, task.lambda, step, 2);
    row.push_back(
        format_number(concurrence_derivative(p, 1, task.lambda, 1, h1)));
    const bool has_r2 = p.is_infinite() || p.sites() >= 5;
    row.push_back(has_r2 ? format_number(concurrence_derivative(p, 2, task.lambda, 2, h2))
                         : "nan");
    return row;
  });
  return t;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& log) {
  const Table t = sweep_table(config);
  const Provenance meta = make_provenance("sweep", config);
  const Format fmt = config.format.value_or(Format::Csv);
  const std::string text = fmt == Format::Csv ? render_csv(t, meta) : render_json(t, meta);
  const std::string path =
      config.output_path.value_or(fmt == Format::Csv ? "sweep.csv" : "sweep.json");
  write_output(path, text, out);
  log << "sweep: " << t.rows.size() << " rows -> " << path << "\n";
  return 0;
}

// ---------------------------------------------------------------- fit

namespace {

struct Series {
  std::vector<double> lambda;
  std::vector<double> d1;
};

// (size label, gamma) -> series sorted by lambda.
std::map<std::pair<std::string, double>, Series> collect_series(
    const std::vector<std::string>& inputs) {
  std::map<std::pair<std::string, double>, std::vector<std::pair<double, double>>> raw;
  for (const auto& path : inputs) {
    const Table t = read_table(path);
    const std::size_t cn = t.column("N"), cg = t.column("gamma"), cl = t.column("lambda"),
                      cd = t.column("dC_1");
    for (const auto& row : t.rows) {
      if (row.size() != t.columns.size())
        throw Error(ErrorCode::MissingSeries, path + ": ragged row");
      raw[{row[cn], parse_cell(row[cg])}].emplace_back(parse_cell(row[cl]),
                                                       parse_cell(row[cd]));
    }
  }
  std::map<std::pair<std::string, double>, Series> out;
  for (auto& [key, pts] : raw) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              pts.end());
    Series s;
    for (const auto& [l, d] : pts) {
      s.lambda.push_back(l);
      s.d1.push_back(d);
    }
    out[key] = std::move(s);
  }
  return out;
}

std::optional<InfiniteLogSlope> slope_from_series(const Series& s, double lo, double hi) {
  InfiniteLogSlope out;
  for (int side : {-1, 1}) {
    std::vector<double> dist, val;
    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
      const double d = s.lambda[i] - 1.0;
      if ((side < 0 ? -d : d) >= lo * (1 - 1e-9) && std::abs(d) <= hi * (1 + 1e-9)) {
        dist.push_back(std::abs(d));
        val.push_back(s.d1[i]);
      }
    }
    if (dist.size() < 3) return std::nullopt;
    (side < 0 ? out.below : out.above) = fit_log(dist, val);
  }
  return out;
}

}  // namespace

json fit_report(const RunConfig& config, const std::vector<std::string>& inputs,
                Table& scatter) {
  if (inputs.empty()) throw Error(ErrorCode::MissingSeries, "no sweep files given");
  const auto all = collect_series(inputs);

  std::set<double> gammas_found;
  for (const auto& [key, s] : all) gammas_found.insert(key.second);
  double gamma = 0.0;
  if (!config.gamma.empty()) {
    gamma = config.gamma.front();
  } else if (gammas_found.size() == 1) {
    gamma = *gammas_found.begin();
  } else {
    throw Error(ErrorCode::BadConfig, "inputs hold several gamma values; choose one with gamma");
  }

  std::vector<long> sizes;
  if (!config.sizes.empty()) {
    for (const auto& n : config.sizes) {
      if (!all.count({to_string(n), gamma}))
        throw Error(ErrorCode::MissingSeries,
                    "no series for N = " + to_string(n) + ", gamma = " + format_number(gamma));
      if (const auto* f = std::get_if<FiniteOdd>(&n)) sizes.push_back(f->n);
    }
  } else {
    for (const auto& [key, s] : all)
      if (key.second == gamma && key.first != "inf") sizes.push_back(std::stol(key.first));
  }
  std::sort(sizes.begin(), sizes.end());
  if (sizes.empty())
    throw Error(ErrorCode::MissingSeries, "no finite-size series for gamma = " +
                                              format_number(gamma));

  const double step = config.step.value_or(kDefaultStep);
  const double lambda_0 = config.lambda_0.value_or(0.5);
  const unsigned threads = thread_count(config);
  constexpr double kWindowLo = 1e-5, kWindowHi = 1e-2, kCollapseWindow = 0.1;

  json rep;
  rep["gamma"] = gamma;
  rep["lambda_0"] = lambda_0;
  rep["observable"] = "dC_1";

  // Minimum per size: grid scan of the sweep column, Brent by re-evaluation.
  std::map<long, Extremum> minima;
  const auto found = parallel_map(sizes.size(), threads, [&](std::size_t i) {
    const Series& s = all.at({std::to_string(sizes[i]), gamma});
    DerivativeCurve curve;
    curve.order = 1;
    curve.r = 1;
    curve.n = FiniteOdd{sizes[i]};
    curve.gamma = gamma;
    curve.step = step;
    curve.lambda_grid = s.lambda;
    curve.values = s.d1;
    return find_minimum(curve);
  });
  json lm = json::array();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    minima[sizes[i]] = found[i];
    lm.push_back({{"N", sizes[i]}, {"lambda_m", found[i].lambda}, {"value", found[i].value}});
  }
  rep["lambda_m"] = lm;

  std::optional<LinearFit> finite;
  if (sizes.size() >= 3) {
    std::vector<double> ns, shifts, depth;
    for (long n : sizes) {
      ns.push_back(static_cast<double>(n));
      shifts.push_back(minima[n].lambda - 1.0);
      depth.push_back(minima[n].value);
    }
    const PowerFit p = fit_power(ns, shifts);
    rep["theta"] = {{"theta", p.theta},
                    {"theta_stderr", p.theta_stderr},
                    {"amplitude", p.amplitude},
                    {"residual", p.residual},
                    {"sign", p.sign}};
    finite = fit_log(ns, depth);
    rep["finite_slope"] = fit_json(*finite);
  } else {
    rep["theta_note"] = "shift and depth fits need at least three sizes";
  }

  std::optional<InfiniteLogSlope> inf;
  if (const auto it = all.find({"inf", gamma}); it != all.end())
    inf = slope_from_series(it->second, kWindowLo, kWindowHi);
  const bool from_sweep = inf.has_value();
  if (!inf) inf = infinite_log_slope(gamma, 1, 1, kWindowLo, kWindowHi, 13, threads);
  rep["infinite_slope"] = {{"below", fit_json(inf->below)},
                           {"above", fit_json(inf->above)},
                           {"mean", inf->slope()},
                           {"window", {kWindowLo, kWindowHi}},
                           {"source", from_sweep ? "sweep" : "computed"}};
  if (finite) rep["nu_ratio"] = prefactor_ratio_nu(finite->slope, inf->slope());

  scatter.columns = {"x", "y", "N"};
  scatter.rows.clear();
  if (sizes.size() < 2) {
    rep["collapse_note"] = "collapse needs at least two sizes; got " +
                           std::to_string(sizes.size());
    return round_all(rep);
  }
  std::vector<CollapseSeries> series;
  for (long n : sizes) {
    const Series& s = all.at({std::to_string(n), gamma});
    CollapseSeries c;
    c.n = n;
    c.lambda_m = minima[n].lambda;
    for (std::size_t i = 0; i < s.lambda.size(); ++i)
      if (std::abs(s.lambda[i] - c.lambda_m) <= kCollapseWindow) {
        c.lambda.push_back(s.lambda[i]);
        c.value.push_back(s.d1[i]);
      }
    DerivativeCurve probe;
    probe.n = FiniteOdd{n};
    probe.gamma = gamma;
    probe.step = step;
    c.value_at_lambda0 = probe.evaluate(lambda_0);
    series.push_back(std::move(c));
  }
  const double q_inf = inf->slope();
  const CollapseResult at1 = collapse(series, lambda_0, 1.0, q_inf);
  const NuFit nu = fit_nu(series, lambda_0, q_inf);
  const CollapseResult at_fit = collapse(series, lambda_0, nu.nu, q_inf);
  rep["collapse_log_amplitude"] = q_inf;
  rep["collapse_window"] = kCollapseWindow;
  rep["collapse_at_nu1"] = collapse_json(at1, 1.0);
  rep["collapse_at_fit"] = collapse_json(at_fit, nu.nu);
  rep["nu_fit"] = {{"nu", nu.nu}, {"stderr", nu.stderr_nu}, {"residual", nu.residual}};
  json q = json::array();
  for (const auto& p : at1.q_samples) {
    q.push_back({p.x, p.y, p.n});
    scatter.rows.push_back({format_number(p.x), format_number(p.y), std::to_string(p.n)});
  }
  rep["q_samples"] = q;
  return round_all(rep);
}

int cmd_fit(const RunConfig& config, const std::vector<std::string>& inputs, std::ostream& out,
            std::ostream& log) {
  Table scatter;
  json rep = fit_report(config, inputs, scatter);
  json doc;
  doc["meta"] = {{"program", "xyent"},
                 {"version", version()},
                 {"command", "fit"},
                 {"generated", utc_timestamp()},
                 {"config", echo(config)},
                 {"inputs", inputs}};
  doc["report"] = std::move(rep);
  const std::string path = config.output_path.value_or("fit.json");
  write_output(path, doc.dump(1) + "\n", out);
  if (!scatter.rows.empty()) {
    const Format fmt = config.format.value_or(Format::Csv);
    Provenance meta = make_provenance("fit collapse", config);
    const std::string base = path == "-" ? std::string("collapse") : path;
    const std::string scatter_path = base + (fmt == Format::Csv ? ".collapse.csv" : ".collapse.json");
    write_output(scatter_path,
                 fmt == Format::Csv ? render_csv(scatter, meta) : render_json(scatter, meta),
                 out);
    log << "fit: collapse scatter -> " << scatter_path << "\n";
  }
  log << "fit: report -> " << path << "\n";
  return 0;
}

// ---------------------------------------------------------------- oracle-check

std::vector<OracleDeviation> oracle_check(const RunConfig& config,
                                          ConventionPerturbation perturb) {
  std::vector<long> sizes;
  if (config.sizes.empty()) {
    sizes = {3, 5, 7, 9, 11};
  } else {
    for (const auto& n : config.sizes) {
      const auto* f = std::get_if<FiniteOdd>(&n);
      if (!f) throw Error(ErrorCode::InvalidSize, "oracle-check needs finite sizes");
      if (f->n > ed::kMaxSites)
        throw Error(ErrorCode::SizeTooLarge, "N = " + std::to_string(f->n) +
                                                 " exceeds the diagonalization limit of " +
                                                 std::to_string(ed::kMaxSites));
      sizes.push_back(f->n);
    }
  }
  const std::vector<double> gammas =
      config.gamma.empty() ? std::vector<double>{0.25, 0.5, 1.0} : config.gamma;
  const bool grid_given = config.lambda_min || config.lambda_max || config.grid_points;
  const std::vector<double> lambdas = grid_given
                                          ? lambda_grid(config, 0.0, 2.0, 6)
                                          : std::vector<double>{0.0, 0.5, 0.9, 1.0, 1.1, 2.0};

  struct Point {
    long n;
    double gamma, lambda;
  };
  std::vector<Point> points;
  for (long n : sizes)
    for (double g : gammas)
      for (double l : lambdas) points.push_back({n, g, l});

  const std::vector<std::string> names{"mz", "gxx", "gyy", "gzz", "rdm", "concurrence"};
  const auto per_point = parallel_map(points.size(), thread_count(config), [&](std::size_t i) {
    const Point& pt = points[i];
    const ModelParams p = make_params(FiniteOdd{pt.n}, pt.gamma, pt.lambda);
    const ed::DenseGroundState gs = ed::solve(p);
    const int r_max = static_cast<int>((pt.n - 1) / 2);
    const CorrelatorSet corr = correlators(p, r_max, perturb);
    std::vector<double> dev(names.size(), 0.0);
    dev[0] = std::abs(ed::magnetization(gs, 1) - corr.mz);
    for (int r = 1; r <= r_max; ++r) {
      dev[1] = std::max(dev[1], std::abs(ed::correlator(gs, Axis::X, 1, 1 + r) - corr.xx(r)));
      dev[2] = std::max(dev[2], std::abs(ed::correlator(gs, Axis::Y, 1, 1 + r) - corr.yy(r)));
      dev[3] = std::max(dev[3], std::abs(ed::correlator(gs, Axis::Z, 1, 1 + r) - corr.zz(r)));
      const TwoSiteState exact = ed::reduced_density_matrix(gs, 1, 1 + r);
      try {
        const TwoSiteState free = assemble_rdm(corr, r);
        dev[4] = std::max(dev[4], (exact.rho - free.rho).cwiseAbs().maxCoeff());
        dev[5] = std::max(dev[5], std::abs(concurrence(exact) - concurrence(free)));
      } catch (const Error&) {
        dev[4] = dev[5] = std::numeric_limits<double>::infinity();
      }
    }
    return dev;
  });

  std::vector<OracleDeviation> out;
  for (std::size_t q = 0; q < names.size(); ++q) {
    OracleDeviation d{names[q], -1.0, 0, 0.0, 0.0};
    for (std::size_t i = 0; i < points.size(); ++i)
      if (per_point[i][q] > d.max_deviation)
        d = {names[q], per_point[i][q], points[i].n, points[i].gamma, points[i].lambda};
    out.push_back(d);
  }
  return out;
}

int cmd_oracle_check(const RunConfig& config, ConventionPerturbation perturb,
                     std::ostream& out, std::ostream& log) {
  const auto devs = oracle_check(config, perturb);
  Table t;
  t.columns = {"quantity", "max_deviation", "worst_N", "worst_gamma", "worst_lambda", "verdict"};
  bool pass = true;
  for (const auto& d : devs) {
    const bool ok = d.max_deviation < kOracleTolerance;
    pass = pass && ok;
    t.rows.push_back({d.quantity, format_number(d.max_deviation), std::to_string(d.n),
                      format_number(d.gamma), format_number(d.lambda), ok ? "PASS" : "FAIL"});
  }
  Provenance meta = make_provenance("oracle-check", config);
  meta.results.push_back(std::string("verdict = ") + (pass ? "PASS" : "FAIL"));
  const Format fmt = config.format.value_or(Format::Csv);
  write_output(config.output_path.value_or("-"),
               fmt == Format::Csv ? render_csv(t, meta) : render_json(t, meta), out);
  for (const auto& d : devs)
    if (!(d.max_deviation < kOracleTolerance))
      log << "oracle-check: FAIL " << d.quantity << " deviation "
          << format_number(d.max_deviation) << " at N = " << d.n
          << ", gamma = " << format_number(d.gamma)
          << ", lambda = " << format_number(d.lambda) << "\n";
  if (pass) {
    double worst = 0.0;
    for (const auto& d : devs) worst = std::max(worst, d.max_deviation);
    log << "oracle-check: PASS, max deviation " << format_number(worst) << "\n";
  }
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------- range

RangeSummary range_table(const RunConfig& config) {
  const std::vector<ChainSize> sizes =
      sorted_sizes(config.sizes.empty() ? std::vector<ChainSize>{Infinite{}} : config.sizes);
  std::vector<double> gammas =
      config.gamma.empty() ? std::vector<double>{1.0, 0.5, 0.25, 0.125} : config.gamma;
  std::sort(gammas.begin(), gammas.end(), std::greater<>());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
  const std::vector<double> grid = lambda_grid(config, 0.0, 2.0, 201);
  const double threshold = config.threshold.value_or(kRangeThreshold);
  const unsigned threads = thread_count(config);

  RangeSummary out;
  out.table.columns = {"N",           "gamma",        "xi_E", "total_concurrence_at_lambda_c",
                       "lambda_c1_max", "total_concurrence_at_c1_max"};
  for (const auto& n : sizes) {
    std::vector<double> g_used, xi_used;
    for (double g : gammas) {
      const ModelParams p = make_params(n, g, CriticalConstants::lambda_c);
      const int xi = entanglement_range(p, grid, threshold, threads);
      const double total_c = total_concurrence(p, CriticalConstants::lambda_c);
      const ConcurrenceCurve c1 = concurrence_profile(p, 1, grid, threads);
      const auto& v = c1.at(1);
      const std::size_t k =
          static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
      const double total_max = total_concurrence(p, grid[k]);
      out.table.rows.push_back({to_string(n), format_number(g), std::to_string(xi),
                                format_number(total_c), format_number(grid[k]),
                                format_number(total_max)});
      if (xi > 0) {
        g_used.push_back(g);
        xi_used.push_back(std::log(static_cast<double>(xi)));
      }
    }
    if (std::holds_alternative<Infinite>(n) && g_used.size() >= 3)
      out.log_slope = fit_log(g_used, xi_used).slope;
  }
  if (!out.log_slope && gammas.size() >= 3 && !sizes.empty()) {
    // No infinite chain requested: use the largest finite size.
    std::vector<double> g_used, xi_used;
    for (const auto& row : out.table.rows)
      if (row[0] == to_string(sizes.back()) && std::stol(row[2]) > 0) {
        g_used.push_back(std::stod(row[1]));
        xi_used.push_back(std::log(std::stod(row[2])));
      }
    if (g_used.size() >= 3) out.log_slope = fit_log(g_used, xi_used).slope;
  }
  return out;
}

int cmd_range(const RunConfig& config, std::ostream& out, std::ostream& log) {
  const RangeSummary s = range_table(config);
  Provenance meta = make_provenance("range", config);
  if (s.log_slope) meta.results.push_back("xi_E_log_slope = " + format_number(*s.log_slope));
  const Format fmt = config.format.value_or(Format::Csv);
  write_output(config.output_path.value_or("-"),
               fmt == Format::Csv ? render_csv(s.table, meta) : render_json(s.table, meta), out);
  if (s.log_slope) log << "range: d ln xi_E / d ln gamma = " << format_number(*s.log_slope) << "\n";
  return 0;
}

}  // namespace xyent
