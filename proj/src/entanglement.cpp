#include "xyent/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include "xyent/parallel.hpp"

namespace xyent {

namespace {

// sy x sy in the {uu, ud, du, dd} basis; real because i * i = -1.
Eigen::Matrix4d flip_operator() {
  Eigen::Matrix4d y = Eigen::Matrix4d::Zero();
  y(0, 3) = y(3, 0) = -1.0;
  y(1, 2) = y(2, 1) = 1.0;
  return y;
}

int max_separation(const ModelParams& params) {
  if (params.is_infinite()) return 1 << 12;
  return static_cast<int>((params.sites() - 1) / 2);
}

}  // namespace

StateDiagnostics diagnose(const TwoSiteState& state) {
  const Eigen::Matrix4d& rho = state.rho;
  StateDiagnostics d;
  d.trace_error = std::abs(rho.trace() - 1.0);
  d.symmetry_error = (rho - rho.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(0.5 * (rho + rho.transpose()),
                                                    Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues()[0];
  double forbidden = std::abs(rho(1, 1) - rho(2, 2));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const bool allowed = a == b || (a == 1 && b == 2) || (a == 2 && b == 1) ||
                           (a == 0 && b == 3) || (a == 3 && b == 0);
      if (!allowed) forbidden = std::max(forbidden, std::abs(rho(a, b)));
    }
  d.structure_error = forbidden;
  return d;
}

TwoSiteState assemble_rdm(const CorrelatorSet& corr, int r) {
  const double mz = corr.mz;
  const double xx = corr.xx(r);
  const double yy = corr.yy(r);
  const double zz = corr.zz(r);
  TwoSiteState s;
  s.rho(0, 0) = 0.25 * (1.0 + 2.0 * mz + zz);
  s.rho(3, 3) = 0.25 * (1.0 - 2.0 * mz + zz);
  s.rho(1, 1) = s.rho(2, 2) = 0.25 * (1.0 - zz);
  s.rho(1, 2) = s.rho(2, 1) = 0.25 * (xx + yy);
  s.rho(0, 3) = s.rho(3, 0) = 0.25 * (xx - yy);
  const double lowest = diagnose(s).min_eigenvalue;
  if (lowest < -1e-8)
    throw Error(ErrorCode::NotPositive,
                "reduced density matrix at r = " + std::to_string(r) +
                    " has eigenvalue " + std::to_string(lowest));
  return s;
}

Eigen::Matrix4d spin_flip(const TwoSiteState& state) {
  const Eigen::Matrix4d y = flip_operator();
  return y * state.rho * y;
}

Eigen::Vector4d wootters_roots(const TwoSiteState& state) {
  const Eigen::Matrix4d rho = 0.5 * (state.rho + state.rho.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(rho);
  if (es.eigenvalues()[0] < -1e-10)
    throw Error(ErrorCode::SpectrumInconsistent,
                "density matrix eigenvalue " + std::to_string(es.eigenvalues()[0]));
  const Eigen::Vector4d w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix4d sqrt_rho =
      es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::Matrix4d a = sqrt_rho * flip_operator() * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> roots(0.5 * (a + a.transpose()),
                                                       Eigen::EigenvaluesOnly);
  Eigen::Vector4d r = roots.eigenvalues().cwiseAbs();
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

double concurrence(const TwoSiteState& state) {
  const Eigen::Vector4d r = wootters_roots(state);
  return std::max(0.0, r[0] - r[1] - r[2] - r[3]);
}

std::vector<double> concurrences(const ModelParams& params, int r_max, ParitySector sector) {
  const CorrelatorSet corr = correlators(params, r_max, ConventionPerturbation::None, sector);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(r_max));
  for (int r = 1; r <= r_max; ++r) out.push_back(concurrence(assemble_rdm(corr, r)));
  return out;
}

ConcurrenceCurve concurrence_profile(const ModelParams& params, int r_max,
                                     const std::vector<double>& lambda_grid,
                                     unsigned threads) {
  for (std::size_t i = 1; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] > lambda_grid[i - 1]))
      throw Error(ErrorCode::BadConfig, "lambda grid must be strictly increasing");
  const auto rows = parallel_map(lambda_grid.size(), threads, [&](std::size_t i) {
    return concurrences(params.with_lambda(lambda_grid[i]), r_max);
  });
  ConcurrenceCurve curve{params.size(), params.gamma(), lambda_grid, {}};
  for (int r = 1; r <= r_max; ++r) {
    auto& column = curve.c_values[r];
    column.reserve(rows.size());
    for (const auto& row : rows) column.push_back(row[static_cast<std::size_t>(r - 1)]);
  }
  return curve;
}

int entanglement_range(const ModelParams& params, const std::vector<double>& lambda_grid,
                       double threshold, unsigned threads) {
  const int limit = max_separation(params);
  int r_max = std::min(default_r_max(params.gamma()), limit);
  for (;;) {
    const ConcurrenceCurve curve =
        concurrence_profile(params, r_max, lambda_grid, threads);
    int range = 0;
    for (const auto& [r, values] : curve.c_values)
      if (!values.empty() && *std::max_element(values.begin(), values.end()) > threshold)
        range = std::max(range, r);
    if (range < r_max || r_max >= limit) return range;
    r_max = std::min(2 * r_max, limit);
  }
}

double total_concurrence(const ModelParams& params, double lambda) {
  const ModelParams p = params.with_lambda(lambda);
  const int limit = max_separation(p);
  int r_max = std::min(default_r_max(p.gamma()), limit);
  for (;;) {
    const std::vector<double> c = concurrences(p, r_max);
    const std::size_t tail = std::min<std::size_t>(3, c.size());
    const bool settled = std::all_of(c.end() - static_cast<std::ptrdiff_t>(tail), c.end(),
                                     [](double v) { return v < 1e-12; });
    if (settled || r_max >= limit) {
      double sum = 0.0;
      for (double v : c) sum += v;
      return sum;
    }
    r_max = std::min(2 * r_max, limit);
  }
}

}  // namespace xyent
