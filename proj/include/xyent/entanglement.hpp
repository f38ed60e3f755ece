#ifndef XYENT_ENTANGLEMENT_HPP
#define XYENT_ENTANGLEMENT_HPP

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "xyent/fermion.hpp"
#include "xyent/model.hpp"
#include "xyent/two_site_state.hpp"

namespace xyent {

inline constexpr double kRangeThreshold = 1e-8;

/// Reduced density matrix of spins j, j+r from correlators. Reality, parity
/// and translation invariance leave only
///
///   rho11 = (1 + 2 mz + zz) / 4     rho44 = (1 - 2 mz + zz) / 4
///   rho22 = rho33 = (1 - zz) / 4
///   rho23 = (xx + yy) / 4           rho14 = (xx - yy) / 4
///
/// Throws NotPositive if an eigenvalue drops below -1e-8.
TwoSiteState assemble_rdm(const CorrelatorSet& corr, int r);

/// (sy x sy) rho* (sy x sy).
Eigen::Matrix4d spin_flip(const TwoSiteState& state);

/// The four r_alpha (square roots of the spectrum of rho * spin_flip(rho)),
/// descending. Computed as |eig(sqrt(rho) Y sqrt(rho))|, which squares to the
/// symmetric matrix sqrt(rho) rho~ sqrt(rho) and so shares its spectrum.
Eigen::Vector4d wootters_roots(const TwoSiteState& state);

/// max(0, r1 - r2 - r3 - r4). Throws SpectrumInconsistent if rho has an
/// eigenvalue below -1e-10.
double concurrence(const TwoSiteState& state);

/// C(r) for r = 1..r_max at one parameter point.
std::vector<double> concurrences(const ModelParams& params, int r_max,
                                 ParitySector sector = ParitySector::Lowest);

struct ConcurrenceCurve {
  ChainSize n;
  double gamma = 1.0;
  std::vector<double> lambda_grid;
  std::map<int, std::vector<double>> c_values;  // r -> C(r) over the grid

  const std::vector<double>& at(int r) const { return c_values.at(r); }
};

/// Each grid point is independent; `threads` > 1 evaluates them concurrently.
ConcurrenceCurve concurrence_profile(const ModelParams& params, int r_max,
                                     const std::vector<double>& lambda_grid,
                                     unsigned threads = 1);

/// Largest r with max over the grid of C(r) above `threshold` (0 if none).
/// r_max grows until the outermost separation is unentangled everywhere.
int entanglement_range(const ModelParams& params,
                       const std::vector<double>& lambda_grid,
                       double threshold = kRangeThreshold, unsigned threads = 1);

/// sum_r C(r), summed until the remaining separations are unentangled.
double total_concurrence(const ModelParams& params, double lambda);

}  // namespace xyent

#endif
