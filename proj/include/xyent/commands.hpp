#ifndef XYENT_COMMANDS_HPP
#define XYENT_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "xyent/fermion.hpp"
#include "xyent/run_config.hpp"

namespace xyent {

std::string version();

/// 12 significant digits; "inf"/"nan" for non-finite values.
std::string format_number(double v);

/// Columns plus preformatted cells. Rows are kept in the order given.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

/// Header comment lines written above every data section.
struct Provenance {
  std::string command;
  std::string timestamp;  // the only line allowed to differ between re-runs
  std::vector<std::string> config;
  std::vector<std::string> results;  // summary lines, e.g. fitted slopes
};

std::string render_csv(const Table& table, const Provenance& meta);
std::string render_json(const Table& table, const Provenance& meta);

/// Reads a CSV or JSON table written by render_csv / render_json.
Table read_table(const std::string& path);

/// Writes all of `content` or nothing: on failure the file is removed.
/// "-" writes to `stdout_stream`.
void write_output(const std::string& path, const std::string& content,
                  std::ostream& stdout_stream);

std::string utc_timestamp();

// sweep: one row per (N, gamma, lambda), sorted by N (inf last), gamma, lambda.
Table sweep_table(const RunConfig& config);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& log);

// fit: scaling report from sweep files.
nlohmann::json fit_report(const RunConfig& config, const std::vector<std::string>& inputs,
                          Table& collapse_scatter);
int cmd_fit(const RunConfig& config, const std::vector<std::string>& inputs,
            std::ostream& out, std::ostream& log);

// oracle-check: ED against free fermions on small chains.
struct OracleDeviation {
  std::string quantity;
  double max_deviation = 0.0;
  long n = 0;
  double gamma = 0.0;
  double lambda = 0.0;
};

inline constexpr double kOracleTolerance = 1e-8;

std::vector<OracleDeviation> oracle_check(
    const RunConfig& config, ConventionPerturbation perturb = ConventionPerturbation::None);
int cmd_oracle_check(const RunConfig& config, ConventionPerturbation perturb,
                     std::ostream& out, std::ostream& log);

// range: entanglement range and total concurrence per (N, gamma).
struct RangeSummary {
  Table table;
  std::optional<double> log_slope;  // d ln xi_E / d ln gamma
};
RangeSummary range_table(const RunConfig& config);
int cmd_range(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace xyent

#endif
