// xyent: sweeps, oracle checks, scaling fits and range tables for the
// transverse-field XY chain.
//
// Exit status: 0 success, 1 compute or validation failure, 2 bad invocation.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xyent/commands.hpp"
#include "xyent/run_config.hpp"

namespace {

struct Common {
  std::string config_path;
  std::map<std::string, std::string> flags;
};

// Every config key is also a flag (--lambda-min for lambda_min, --out for
// output_path). Values stay text until merged over the config file.
void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "key = value config file");
  auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        name, [&common, key](const std::string& v) { common.flags[key] = v; }, help);
  };
  flag("--out", "output_path", "output file, '-' for stdout");
  flag("--format", "format", "csv or json");
  flag("--threads", "threads", "worker threads");
  flag("--gamma", "gamma", "anisotropy, or comma list");
  flag("--sizes", "sizes", "comma list of odd N or 'inf'");
  flag("--lambda-min", "lambda_min", "grid start (distance from 1 for geometric grids)");
  flag("--lambda-max", "lambda_max", "grid end (distance from 1 for geometric grids)");
  flag("--grid-points", "grid_points", "grid points (per side for geometric grids)");
  flag("--grid-kind", "grid_kind", "linear or geometric-about-critical");
  flag("--r-max", "r_max", "largest separation");
  flag("--step", "step", "finite-difference step");
  flag("--threshold", "threshold", "concurrence threshold for the range");
  flag("--lambda-0", "lambda_0", "non-critical reference coupling");
}

xyent::RunConfig effective(const Common& common) {
  xyent::RunConfig c;
  if (!common.config_path.empty()) c = xyent::load_config(common.config_path);
  xyent::apply_overrides(c, common.flags);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairwise entanglement in the transverse-field XY chain"};
  app.set_version_flag("--version", xyent::version());
  app.require_subcommand(1);

  Common sweep_opts, fit_opts, oracle_opts, range_opts;
  auto* sweep = app.add_subcommand("sweep", "correlators, concurrences and derivatives on a grid");
  add_common(sweep, sweep_opts);

  auto* fit = app.add_subcommand("fit", "finite-size scaling report from sweep files");
  add_common(fit, fit_opts);
  std::vector<std::string> inputs;
  fit->add_option("inputs", inputs, "sweep files")->required()->check(CLI::ExistingFile);

  auto* oracle = app.add_subcommand("oracle-check", "compare free fermions with exact diagonalization");
  add_common(oracle, oracle_opts);
  std::string sabotage;
  // Test hook: deliberately breaks one sign to prove the check can fail.
  oracle->add_option("--sabotage", sabotage)->check(CLI::IsMember({"flip-xx"}))->group("");

  auto* range = app.add_subcommand("range", "entanglement range and total concurrence per gamma");
  add_common(range, range_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sweep) return xyent::cmd_sweep(effective(sweep_opts), std::cout, std::cerr);
    if (*fit) return xyent::cmd_fit(effective(fit_opts), inputs, std::cout, std::cerr);
    if (*oracle) {
      const auto perturb = sabotage.empty() ? xyent::ConventionPerturbation::None
                                            : xyent::ConventionPerturbation::FlipXX;
      return xyent::cmd_oracle_check(effective(oracle_opts), perturb, std::cout, std::cerr);
    }
    if (*range) return xyent::cmd_range(effective(range_opts), std::cout, std::cerr);
  } catch (const xyent::Error& e) {
    std::cerr << "xyent: " << e.what() << "\n";
    return e.code() == xyent::ErrorCode::BadConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "xyent: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
