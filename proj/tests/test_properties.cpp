#include <doctest.h>

#include <random>
#include <sstream>

#include "xyent/commands.hpp"
#include "xyent/ed_oracle.hpp"
#include "xyent/entanglement.hpp"
#include "xyent/scaling.hpp"

using namespace xyent;

namespace {

struct Sample {
  ChainSize n;
  double gamma;
  double lambda;
};

std::vector<Sample> samples(std::uint64_t seed, int count, std::vector<long> sizes,
                            bool with_infinite) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gamma(0.05, 1.0), lambda(0.0, 3.0);
  std::uniform_int_distribution<std::size_t> pick(0, sizes.size() - (with_infinite ? 0 : 1));
  std::vector<Sample> out;
  for (int i = 0; i < count; ++i) {
    const std::size_t k = pick(rng);
    const ChainSize n = k == sizes.size() ? ChainSize{Infinite{}} : ChainSize{FiniteOdd{sizes[k]}};
    out.push_back({n, gamma(rng), lambda(rng)});
  }
  return out;
}

std::string strip_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("# generated", 0) != 0) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("assembled density matrices pass hygiene checks") {
  for (const auto& s : samples(20240611, 150, {7, 9, 11, 41, 101, 401, 2701}, true)) {
    const auto c = correlators(make_params(s.n, s.gamma, s.lambda), 3);
    for (int r = 1; r <= 3; ++r) {
      const auto state = assemble_rdm(c, r);
      const auto d = diagnose(state);
      INFO("N=" << to_string(s.n) << " gamma=" << s.gamma << " lambda=" << s.lambda << " r=" << r);
      CHECK(d.ok());
      const double conc = concurrence(state);
      CHECK(conc >= 0.0);
      CHECK(conc <= 1.0);
    }
  }
}

TEST_CASE("partial traces pass hygiene checks") {
  for (const auto& s : samples(7, 25, {3, 5, 7, 9, 11}, false)) {
    const auto gs = ed::solve(make_params(s.n, s.gamma, s.lambda));
    for (int j = 2; j <= 3; ++j) {
      INFO("N=" << to_string(s.n) << " gamma=" << s.gamma << " lambda=" << s.lambda);
      CHECK(diagnose(ed::reduced_density_matrix(gs, 1, j)).ok());
    }
  }
}

TEST_CASE("derivatives survive step halving") {
  for (const auto& s : samples(99, 40, {41, 101, 401, 1601}, true)) {
    for (const auto& [r, order] : {std::pair{1, 1}, std::pair{2, 2}}) {
      const double h = effective_step(s.n, s.lambda, kDefaultStep, order);
      if (s.n == ChainSize{Infinite{}} && std::abs(s.lambda - 1.0) < 10 * h) continue;
      const auto p = make_params(s.n, s.gamma, s.lambda);
      const double a = concurrence_derivative(p, r, s.lambda, order, h);
      const double b = concurrence_derivative(p, r, s.lambda, order, h / 2);
      INFO("N=" << to_string(s.n) << " gamma=" << s.gamma << " lambda=" << s.lambda
                << " order=" << order);
      CHECK(std::abs(a - b) < 1e-6);
    }
  }
}

TEST_CASE("sweeps are deterministic across runs and thread counts") {
  RunConfig c = parse_config("sizes = 11, 41, inf\ngamma = 0.5, 1\ngrid_points = 9\nr_max = 3\n");
  const Table serial = sweep_table(c);
  c.threads = 3;
  const Table threaded = sweep_table(c);
  CHECK(serial.rows == threaded.rows);

  const std::string first = render_csv(serial, Provenance{"sweep", utc_timestamp(), echo(c), {}});
  const std::string second = render_csv(threaded, Provenance{"sweep", "later", echo(c), {}});
  CHECK(first != second);
  CHECK(strip_timestamp(first) == strip_timestamp(second));
}
