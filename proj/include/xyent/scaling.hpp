#ifndef XYENT_SCALING_HPP
#define XYENT_SCALING_HPP

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "xyent/entanglement.hpp"
#include "xyent/model.hpp"

namespace xyent {

inline constexpr double kDefaultStep = 1e-4;

/// A scalar function of lambda at fixed chain size and anisotropy.
using Observable = std::function<double(double)>;

/// lambda -> C(r) at (params.size, params.gamma).
Observable concurrence_observable(const ModelParams& params, int r);

/// Central difference of order 1 or 2 with one Richardson refinement
/// (steps h and h/2). Throws StepTooSmall if lambda +- h are not resolved.
double differentiate(const Observable& f, double lambda, int order, double step);

/// differentiate() applied to C(r) along the branch of the ground state at
/// lambda: finite chains keep the parity sector selected at lambda across
/// the stencil, and a stencil reaching across a kink of C(r) (clipping, a
/// change of the active branch, or a sign change of rho14 or rho23) is
/// replaced by a one-sided stencil on the side of lambda, shrinking the step
/// if needed.
double concurrence_derivative(const ModelParams& params, int r, double lambda, int order,
                              double step);

/// Step actually used at lambda. First derivatives: the base step, shrunk to
/// 0.02/N on finite chains and to |lambda - 1|/10 on the infinite chain, so
/// the stencil never straddles the structure it is resolving. Second
/// derivatives start from 10x the base step and shrink to 0.05 max(1/N,
/// |lambda - 1|) (finite) or min(|lambda - 1|/10, 5e-3 |lambda - 1|^(2/3))
/// (infinite).
double effective_step(const ChainSize& n, double lambda, double base = kDefaultStep,
                      int order = 1);

struct DerivativeCurve {
  int order = 1;
  int r = 1;
  ChainSize n;
  double gamma = 1.0;
  double step = kDefaultStep;  // base step, see effective_step
  std::vector<double> lambda_grid;
  std::vector<double> values;

  /// Re-evaluates the derivative at an arbitrary lambda.
  double evaluate(double lambda) const;
};

/// d^order C(r) / d lambda^order on the curve's grid, re-evaluating C at the
/// stencil points.
DerivativeCurve derivative(const ConcurrenceCurve& curve, int r, int order,
                           double step = kDefaultStep, unsigned threads = 1);

DerivativeCurve derivative_curve(const ModelParams& params, int r, int order,
                                 const std::vector<double>& lambda_grid,
                                 double step = kDefaultStep, unsigned threads = 1);

struct Extremum {
  double lambda = 0.0;
  double value = 0.0;
};

/// Grid scan, then Brent refinement of the bracketing cell by
/// re-evaluation. Throws NoInteriorMinimum when the smallest sample sits on
/// the edge of the grid.
Extremum find_minimum(const DerivativeCurve& curve, double tolerance = 1e-10);
Extremum find_minimum(const Observable& f, std::span<const double> grid,
                      double tolerance = 1e-10);
Extremum find_maximum(const Observable& f, std::span<const double> grid,
                      double tolerance = 1e-10);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square misfit
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

/// Least squares y = slope * ln(x) + intercept. Needs x > 0 and at least
/// three points; throws DegenerateDesign when all x coincide.
LinearFit fit_log(std::span<const double> x, std::span<const double> y);

struct PowerFit {
  double theta = 0.0;      // |shift| ~ amplitude * n^-theta
  double amplitude = 0.0;
  double residual = 0.0;   // rms misfit in ln|shift|
  double theta_stderr = 0.0;
  int sign = 1;            // common sign of the shifts
};

/// Log-log fit of |shift| against n. Throws SignChange when the shifts do
/// not share one sign.
PowerFit fit_power(std::span<const double> n_values, std::span<const double> shifts);

/// nu = |infinite_slope| / |finite_slope|. Throws ZeroDenominator.
double prefactor_ratio_nu(double finite_slope, double infinite_slope);

/// One finite-size curve prepared for collapse.
struct CollapseSeries {
  long n = 0;
  std::vector<double> lambda;  // ascending
  std::vector<double> value;   // derivative of C at lambda
  double lambda_m = 1.0;       // position of the extremum
  double value_at_lambda0 = 0.0;
};

struct CollapsePoint {
  double x = 0.0;
  double y = 0.0;
  long n = 0;
};

struct CollapseResult {
  double residual = 0.0;       // mean squared spread on the common x grid
  double rms_spread = 0.0;     // sqrt(residual)
  double dynamic_range = 0.0;  // max - min of the mean curve on that grid
  double overlap_lo = 0.0;
  double overlap_hi = 0.0;
  std::vector<CollapsePoint> q_samples;
};

/// Rescales each series to
///
///   x = N^{1/nu} (lambda - lambda_m)
///   y = value - value(lambda_0) + log_amplitude * ln|N^{1/nu}(lambda_0 - lambda_m)|
///
/// For a log-divergent observable the difference value - value(lambda_0)
/// equals Q(x) - Q(x_0), and the last term restores Q(x_0) from its large-x
/// form Q(x_0) ~ Q(inf) ln x_0; with log_amplitude = Q(inf) the rescaled
/// curves fall on Q(x). Residual is the mean (over a common grid uniform in
/// asinh x, restricted to the overlap of all x ranges) of the variance
/// across series of linearly interpolated y. Throws NoOverlap.
CollapseResult collapse(std::span<const CollapseSeries> series, double lambda_0,
                        double nu, double log_amplitude);

struct NuFit {
  double nu = 1.0;
  double stderr_nu = 0.0;
  double residual = 0.0;
};

/// Minimises the collapse residual over nu in [lo, hi]: coarse scan, then
/// Brent to 1e-4. Throws FlatObjective if the residual varies by < 1e-12.
NuFit fit_nu(std::span<const CollapseSeries> series, double lambda_0,
             double log_amplitude, double lo = 0.5, double hi = 2.0);

/// lambda = lambda_m +- 10^u / N, u uniform in [-2, log10(N * half_width)],
/// `per_side` points each side, plus lambda_m itself. Clipped to lambda >= 0.
std::vector<double> scaled_grid(long n, double lambda_m, int per_side = 60,
                                double half_width = 0.5);

/// 1 +- d, d geometric in [lo, hi]; `side` < 0 below, > 0 above criticality.
std::vector<double> critical_window(double lo, double hi, int points, int side);

struct InfiniteLogSlope {
  LinearFit below;  // lambda < 1
  LinearFit above;  // lambda > 1
  double slope() const { return 0.5 * (below.slope + above.slope); }
};

/// Fits d^order C(r) against ln|lambda - 1| on the infinite chain over
/// |lambda - 1| in [lo, hi] on both sides.
InfiniteLogSlope infinite_log_slope(double gamma, int r, int order, double lo = 1e-5,
                                    double hi = 1e-2, int points = 13,
                                    unsigned threads = 1);

struct SuiteConfig {
  double gamma = 1.0;
  int r = 1;
  int order = 1;
  std::vector<long> sizes{41, 101, 251, 401, 801, 1601, 2701};
  std::vector<long> shift_sizes{11, 41, 101, 251, 401};
  double lambda_0 = 0.5;
  double step = kDefaultStep;
  double window_lo = 1e-5;
  double window_hi = 1e-2;
  int collapse_points_per_side = 60;
  // Collapse data stay within |lambda - lambda_m| <= collapse_window, well
  // inside the distance to any reference coupling lambda_0 in [0.4, 0.6].
  double collapse_window = 0.1;
  unsigned threads = 1;
};

struct ScalingReport {
  double gamma = 1.0;
  int r = 1;
  int order = 1;
  double lambda_0 = 0.5;
  std::map<long, Extremum> lambda_m_per_n;
  std::optional<PowerFit> theta;
  std::optional<LinearFit> finite_fit;    // extremum value vs ln N
  InfiniteLogSlope infinite_fit;
  std::optional<double> nu_ratio;
  std::optional<NuFit> nu_fit;
  std::optional<CollapseResult> collapse_at_nu1;
  std::optional<CollapseResult> collapse_at_fit;
  std::optional<LinearFit> q_tail_fit;    // Q(x) vs ln x for large x
  std::string collapse_note;              // why collapse fields are absent
};

/// Extremum of the derivative curve for one size: minimum of d^order C(r).
Extremum locate_extremum(const ModelParams& params, int r, int order,
                         double step = kDefaultStep);

CollapseSeries collapse_series(const ModelParams& params, int r, int order,
                               double lambda_m, double lambda_0, int per_side,
                               double half_width, double step = kDefaultStep,
                               unsigned threads = 1);

/// Full finite-size-scaling pipeline for one anisotropy and one observable.
ScalingReport scaling_suite(const SuiteConfig& config);

/// Location and height of the C(2) maximum on a finite chain.
Extremum c2_maximum(const ModelParams& params);

struct C2Report {
  std::map<long, Extremum> maxima;
  InfiniteLogSlope second_derivative_slope;
  ScalingReport collapse;
};

/// Next-nearest-neighbour analysis: C(2) maxima per size, infinite-chain
/// log slope of the second derivative, and collapse of the second derivative.
C2Report c2_analysis(const std::vector<long>& sizes, double window_lo = 1e-5,
                     double window_hi = 1e-2, unsigned threads = 1);

}  // namespace xyent

#endif
