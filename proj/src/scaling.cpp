#include "xyent/scaling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/tools/minima.hpp>

#include "xyent/parallel.hpp"

namespace xyent {

namespace {

constexpr double kNoiseFloor = 1e-12;

double central(const Observable& f, double x, int order, double h) {
  if (order == 1) return (f(x + h) - f(x - h)) / (2.0 * h);
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Second-order one-sided stencils for points closer than h to lambda = 0.
double forward(const Observable& f, double x, int order, double h) {
  if (order == 1) return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
  return (2.0 * f(x) - 5.0 * f(x + h) + 4.0 * f(x + 2.0 * h) - f(x + 3.0 * h)) / (h * h);
}

std::vector<double> linspace(double a, double b, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    out[static_cast<std::size_t>(i)] =
        points == 1 ? a : a + (b - a) * i / static_cast<double>(points - 1);
  return out;
}

// Local Brent refinement of the minimum of f around grid index i.
Extremum refine(const Observable& f, std::span<const double> grid,
                const std::vector<double>& values, std::size_t i, double tolerance) {
  if (i == 0 || i + 1 >= grid.size())
    throw Error(ErrorCode::NoInteriorMinimum,
                "smallest sample at lambda = " + std::to_string(grid[i]) +
                    " is on the edge of the window");
  const double lo = grid[i - 1];
  const double hi = grid[i + 1];
  const double scale = std::max(1.0, std::abs(grid[i]));
  const int bits = std::clamp(
      static_cast<int>(std::ceil(1.0 - std::log2(tolerance / scale))), 8,
      std::numeric_limits<double>::digits / 2 + 4);
  std::uintmax_t iterations = 200;
  const auto [x, v] = boost::math::tools::brent_find_minima(f, lo, hi, bits, iterations);
  if (v > values[i]) return {grid[i], values[i]};
  return {x, v};
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const auto j = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

struct Transformed {
  std::vector<double> x;
  std::vector<double> y;
};

Transformed transform(const CollapseSeries& s, double lambda_0, double nu,
                      double log_amplitude) {
  const double scale = std::pow(static_cast<double>(s.n), 1.0 / nu);
  const double x0 = scale * (lambda_0 - s.lambda_m);
  const double shift =
      -s.value_at_lambda0 + log_amplitude * std::log(std::max(std::abs(x0), 1e-300));
  Transformed t;
  t.x.reserve(s.lambda.size());
  t.y.reserve(s.lambda.size());
  for (std::size_t i = 0; i < s.lambda.size(); ++i) {
    t.x.push_back(scale * (s.lambda[i] - s.lambda_m));
    t.y.push_back(s.value[i] + shift);
  }
  return t;
}

double window_half_width(long n, double gamma) {
  return std::min(0.9, 4.0 / (gamma * static_cast<double>(n)));
}

}  // namespace

Observable concurrence_observable(const ModelParams& params, int r) {
  return [params, r](double lambda) {
    return concurrences(params.with_lambda(lambda), r)[static_cast<std::size_t>(r - 1)];
  };
}

namespace {

enum class Stencil { Central, Forward, Backward };

double differentiate_with(const Observable& f, double lambda, int order, double step,
                          Stencil stencil) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::BadConfig, "derivative order must be 1 or 2");
  const double half = 0.5 * step;
  if (!(step > 0.0) || (lambda + half) - (lambda - half) < kNoiseFloor)
    throw Error(ErrorCode::StepTooSmall,
                "step " + std::to_string(step) + " below the noise floor at lambda = " +
                    std::to_string(lambda));
  // Error of both stencils is c h^2 + O(h^4); (4 D(h/2) - D(h)) / 3 removes c.
  // A backward stencil is the forward one with a negative step.
  auto once = [&](double h) {
    switch (stencil) {
      case Stencil::Central: return central(f, lambda, order, h);
      case Stencil::Forward: return forward(f, lambda, order, h);
      case Stencil::Backward: break;
    }
    return forward(f, lambda, order, -h);
  };
  return (4.0 * once(half) - once(step)) / 3.0;
}

}  // namespace

double differentiate(const Observable& f, double lambda, int order, double step) {
  return differentiate_with(f, lambda, order, step,
                            lambda - step < 0.0 ? Stencil::Forward : Stencil::Central);
}

namespace {

// Identifies the smooth piece of C(r) at one point. For the X-shaped density
// matrix C = 2 max(0, |rho14| - sqrt(rho22 rho33), |rho23| - sqrt(rho11 rho44)),
// which has kinks where rho14 or rho23 change sign, where the larger branch
// changes, and where the clipping switches on.
std::array<bool, 4> smooth_piece(const CorrelatorSet& corr, int r) {
  const Eigen::Matrix4d rho = assemble_rdm(corr, r).rho;
  const double a = std::abs(rho(0, 3)) - std::sqrt(std::max(0.0, rho(1, 1) * rho(2, 2)));
  const double b = std::abs(rho(1, 2)) - std::sqrt(std::max(0.0, rho(0, 0) * rho(3, 3)));
  if (std::max(a, b) <= 0.0) return {false, false, false, false};
  return {true, a > b, rho(0, 3) > 0.0, rho(1, 2) > 0.0};
}

}  // namespace

double concurrence_derivative(const ModelParams& params, int r, double lambda, int order,
                              double step) {
  // On finite chains the ground state can switch parity sector inside the
  // stencil; follow the sector selected at lambda so the stencil stays on
  // one smooth branch.
  const ParitySector sector = ground_sector(params);
  const Observable f = [&params, r, sector](double x) {
    return concurrences(params.with_lambda(x), r, sector)[static_cast<std::size_t>(r - 1)];
  };
  // The odd sector also changes branch at lambda = 1, where its self-paired
  // mode changes sign.
  auto piece = [&](double x) {
    const auto corr = correlators(params.with_lambda(x), r, ConventionPerturbation::None, sector);
    return std::pair{smooth_piece(corr, r), sector == ParitySector::Odd && x > 1.0};
  };
  const auto here = piece(lambda);
  auto same_piece = [&](double x) { return x < 0.0 || piece(x) == here; };
  // Keep the stencil on a side of lambda without a kink, shrinking it if
  // kinks lie on both sides.
  for (int attempt = 0; attempt < 8; ++attempt, step *= 0.25) {
    const bool left = same_piece(lambda - step);
    const bool right = same_piece(lambda + step);
    if (left && right) return differentiate(f, lambda, order, step);
    if (left && same_piece(lambda - 3.0 * step) && lambda - 3.0 * step >= 0.0)
      return differentiate_with(f, lambda, order, step, Stencil::Backward);
    if (right && same_piece(lambda + 3.0 * step))
      return differentiate_with(f, lambda, order, step, Stencil::Forward);
  }
  return differentiate(f, lambda, order, step);
}

double effective_step(const ChainSize& n, double lambda, double base, int order) {
  const double dist = std::abs(lambda - CriticalConstants::lambda_c);
  if (order == 2) {
    // Roundoff in C grows as 1/h^2 here, so the step follows the local
    // length scale, max(1/N, |lambda - 1|), instead of a fixed fraction of 1/N.
    const double wide = 10.0 * base;
    if (const auto* f = std::get_if<FiniteOdd>(&n))
      return std::min(wide, 0.05 * std::max(1.0 / static_cast<double>(f->n), dist));
    // Truncation error scales as (h/dist)^4 and roundoff as 1/h^2; their
    // balance gives h ~ dist^(2/3).
    return dist > 0.0 ? std::min({wide, 0.1 * dist, 5e-3 * std::cbrt(dist * dist)}) : wide;
  }
  if (const auto* f = std::get_if<FiniteOdd>(&n))
    return std::min(base, 0.02 / static_cast<double>(f->n));
  return dist > 0.0 ? std::min(base, 0.1 * dist) : base;
}

double DerivativeCurve::evaluate(double lambda) const {
  const ModelParams params = make_params(n, gamma, lambda);
  return concurrence_derivative(params, r, lambda, order,
                                effective_step(n, lambda, step, order));
}

DerivativeCurve derivative_curve(const ModelParams& params, int r, int order,
                                 const std::vector<double>& lambda_grid, double step,
                                 unsigned threads) {
  DerivativeCurve curve;
  curve.order = order;
  curve.r = r;
  curve.n = params.size();
  curve.gamma = params.gamma();
  curve.step = step;
  curve.lambda_grid = lambda_grid;
  curve.values = parallel_map(lambda_grid.size(), threads, [&](std::size_t i) {
    return curve.evaluate(lambda_grid[i]);
  });
  return curve;
}

DerivativeCurve derivative(const ConcurrenceCurve& curve, int r, int order, double step,
                           unsigned threads) {
  if (curve.lambda_grid.empty())
    throw Error(ErrorCode::BadConfig, "empty concurrence curve");
  const ModelParams params = make_params(curve.n, curve.gamma, curve.lambda_grid.front());
  return derivative_curve(params, r, order, curve.lambda_grid, step, threads);
}

Extremum find_minimum(const Observable& f, std::span<const double> grid, double tolerance) {
  if (grid.size() < 3)
    throw Error(ErrorCode::NoInteriorMinimum, "need at least three grid points");
  std::vector<double> values;
  values.reserve(grid.size());
  for (double x : grid) values.push_back(f(x));
  const auto i = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  return refine(f, grid, values, i, tolerance);
}

Extremum find_minimum(const DerivativeCurve& curve, double tolerance) {
  const auto& grid = curve.lambda_grid;
  if (grid.size() < 3)
    throw Error(ErrorCode::NoInteriorMinimum, "need at least three grid points");
  const auto i = static_cast<std::size_t>(
      std::min_element(curve.values.begin(), curve.values.end()) - curve.values.begin());
  return refine([&curve](double l) { return curve.evaluate(l); }, grid, curve.values, i,
                tolerance);
}

Extremum find_maximum(const Observable& f, std::span<const double> grid, double tolerance) {
  const Extremum e = find_minimum([&f](double x) { return -f(x); }, grid, tolerance);
  return {e.lambda, -e.value};
}

LinearFit fit_log(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::DegenerateDesign, "x and y differ in length");
  if (x.size() < 3) throw Error(ErrorCode::DegenerateDesign, "need at least three points");
  const std::size_t n = x.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0))
      throw Error(ErrorCode::DegenerateDesign, "log fit needs positive abscissae");
    u[i] = std::log(x[i]);
  }
  const double mu = std::accumulate(u.begin(), u.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (u[i] - mu) * (u[i] - mu);
    sxy += (u[i] - mu) * (y[i] - my);
  }
  if (sxx <= 1e-300 * n) throw Error(ErrorCode::DegenerateDesign, "all abscissae equal");
  LinearFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mu;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - fit.slope * u[i] - fit.intercept;
    ssr += e * e;
  }
  fit.residual = std::sqrt(ssr / n);
  fit.slope_stderr = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return fit;
}

PowerFit fit_power(std::span<const double> n_values, std::span<const double> shifts) {
  if (n_values.size() != shifts.size())
    throw Error(ErrorCode::DegenerateDesign, "sizes and shifts differ in length");
  int sign = 0;
  std::vector<double> log_abs;
  log_abs.reserve(shifts.size());
  for (double s : shifts) {
    const int si = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
    if (si == 0 || (sign != 0 && si != sign))
      throw Error(ErrorCode::SignChange, "shifts do not share one sign");
    sign = si;
    log_abs.push_back(std::log(std::abs(s)));
  }
  const LinearFit f = fit_log(n_values, log_abs);
  PowerFit p;
  p.theta = std::abs(f.slope);
  p.amplitude = std::exp(f.intercept);
  p.residual = f.residual;
  p.theta_stderr = f.slope_stderr;
  p.sign = sign;
  return p;
}

double prefactor_ratio_nu(double finite_slope, double infinite_slope) {
  if (finite_slope == 0.0 || infinite_slope == 0.0)
    throw Error(ErrorCode::ZeroDenominator, "prefactor ratio needs nonzero slopes");
  return std::abs(infinite_slope) / std::abs(finite_slope);
}

CollapseResult collapse(std::span<const CollapseSeries> series, double lambda_0, double nu,
                        double log_amplitude) {
  if (series.empty()) throw Error(ErrorCode::NoOverlap, "no curves to collapse");
  if (!(nu > 0.0)) throw Error(ErrorCode::BadConfig, "nu must be positive");
  std::vector<Transformed> curves;
  curves.reserve(series.size());
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  CollapseResult out;
  for (const auto& s : series) {
    if (s.lambda.size() < 2 || s.lambda.size() != s.value.size())
      throw Error(ErrorCode::NoOverlap, "series for N = " + std::to_string(s.n) +
                                            " has fewer than two samples");
    curves.push_back(transform(s, lambda_0, nu, log_amplitude));
    const auto& t = curves.back();
    lo = std::max(lo, t.x.front());
    hi = std::min(hi, t.x.back());
    for (std::size_t i = 0; i < t.x.size(); ++i) out.q_samples.push_back({t.x[i], t.y[i], s.n});
  }
  if (!(lo < hi)) throw Error(ErrorCode::NoOverlap, "scaled lambda ranges are disjoint");
  out.overlap_lo = lo;
  out.overlap_hi = hi;

  constexpr int kGrid = 401;
  const auto u = linspace(std::asinh(lo), std::asinh(hi), kGrid);
  double spread = 0.0;
  double mean_min = std::numeric_limits<double>::infinity();
  double mean_max = -mean_min;
  for (double ui : u) {
    const double x = std::clamp(std::sinh(ui), lo, hi);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& t : curves) {
      const double y = interpolate(t.x, t.y, x);
      sum += y;
      sum2 += y * y;
    }
    const double m = sum / curves.size();
    spread += std::max(0.0, sum2 / curves.size() - m * m);
    mean_min = std::min(mean_min, m);
    mean_max = std::max(mean_max, m);
  }
  out.residual = spread / kGrid;
  out.rms_spread = std::sqrt(out.residual);
  out.dynamic_range = mean_max - mean_min;
  return out;
}

NuFit fit_nu(std::span<const CollapseSeries> series, double lambda_0, double log_amplitude,
             double lo, double hi) {
  auto objective = [&](double nu) {
    return collapse(series, lambda_0, nu, log_amplitude).residual;
  };
  constexpr int kScan = 31;
  const auto grid = linspace(lo, hi, kScan);
  std::vector<double> values;
  values.reserve(grid.size());
  for (double nu : grid) values.push_back(objective(nu));
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mx - *mn < 1e-12)
    throw Error(ErrorCode::FlatObjective, "collapse residual is flat in nu");
  const auto i = static_cast<std::size_t>(mn - values.begin());
  const double a = grid[i == 0 ? 0 : i - 1];
  const double b = grid[std::min(i + 1, grid.size() - 1)];
  std::uintmax_t iterations = 200;
  auto [nu, res] = boost::math::tools::brent_find_minima(objective, a, b, 20, iterations);
  if (values[i] < res) {
    nu = grid[i];
    res = values[i];
  }
  NuFit fit;
  fit.nu = nu;
  fit.residual = res;
  // Width at which a quadratic model of the residual doubles.
  const double h = 1e-2;
  const double up = objective(std::min(nu + h, hi));
  const double down = objective(std::max(nu - h, lo));
  const double curvature = (up - 2.0 * res + down) / (h * h);
  fit.stderr_nu = curvature > 0.0 ? std::sqrt(2.0 * res / curvature)
                                  : std::numeric_limits<double>::infinity();
  return fit;
}

std::vector<double> scaled_grid(long n, double lambda_m, int per_side, double half_width) {
  const double nd = static_cast<double>(n);
  const double top = std::log10(nd * half_width);
  std::vector<double> out{lambda_m};
  for (double u : linspace(-2.0, top, per_side)) {
    const double d = std::pow(10.0, u) / nd;
    out.push_back(lambda_m + d);
    if (lambda_m - d >= 0.0) out.push_back(lambda_m - d);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> critical_window(double lo, double hi, int points, int side) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(points));
  for (double u : linspace(std::log10(lo), std::log10(hi), points))
    out.push_back(CriticalConstants::lambda_c + (side < 0 ? -1.0 : 1.0) * std::pow(10.0, u));
  std::sort(out.begin(), out.end());
  return out;
}

InfiniteLogSlope infinite_log_slope(double gamma, int r, int order, double lo, double hi,
                                    int points, unsigned threads) {
  InfiniteLogSlope out;
  for (int side : {-1, 1}) {
    const auto grid = critical_window(lo, hi, points, side);
    const ModelParams params = make_params(Infinite{}, gamma, grid.front());
    const DerivativeCurve curve = derivative_curve(params, r, order, grid, kDefaultStep, threads);
    std::vector<double> dist;
    for (double l : grid) dist.push_back(std::abs(l - CriticalConstants::lambda_c));
    (side < 0 ? out.below : out.above) = fit_log(dist, curve.values);
  }
  return out;
}

Extremum locate_extremum(const ModelParams& params, int r, int order, double step) {
  const long n = params.sites();
  const double w = window_half_width(n, params.gamma());
  const auto grid = linspace(1.0 - w, 1.0 + w, 81);
  const DerivativeCurve curve = derivative_curve(params, r, order, grid, step);
  return find_minimum(curve);
}

CollapseSeries collapse_series(const ModelParams& params, int r, int order,
                               double lambda_m, double lambda_0, int per_side,
                               double half_width, double step, unsigned threads) {
  CollapseSeries s;
  s.n = params.sites();
  s.lambda_m = lambda_m;
  s.lambda = scaled_grid(s.n, lambda_m, per_side, half_width);
  const DerivativeCurve curve = derivative_curve(params, r, order, s.lambda, step, threads);
  s.value = curve.values;
  s.value_at_lambda0 = curve.evaluate(lambda_0);
  return s;
}

ScalingReport scaling_suite(const SuiteConfig& config) {
  ScalingReport rep;
  rep.gamma = config.gamma;
  rep.r = config.r;
  rep.order = config.order;
  rep.lambda_0 = config.lambda_0;

  std::vector<long> all = config.sizes;
  all.insert(all.end(), config.shift_sizes.begin(), config.shift_sizes.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  const auto minima = parallel_map(all.size(), config.threads, [&](std::size_t i) {
    return locate_extremum(make_params(FiniteOdd{all[i]}, config.gamma, 1.0), config.r,
                           config.order, config.step);
  });
  for (std::size_t i = 0; i < all.size(); ++i) rep.lambda_m_per_n[all[i]] = minima[i];

  if (config.shift_sizes.size() >= 3) {
    std::vector<double> ns, shifts;
    for (long n : config.shift_sizes) {
      ns.push_back(static_cast<double>(n));
      shifts.push_back(rep.lambda_m_per_n.at(n).lambda - CriticalConstants::lambda_c);
    }
    rep.theta = fit_power(ns, shifts);
  }
  if (config.sizes.size() >= 3) {
    std::vector<double> ns, depth;
    for (long n : config.sizes) {
      ns.push_back(static_cast<double>(n));
      depth.push_back(rep.lambda_m_per_n.at(n).value);
    }
    rep.finite_fit = fit_log(ns, depth);
  }
  rep.infinite_fit = infinite_log_slope(config.gamma, config.r, config.order,
                                        config.window_lo, config.window_hi, 13,
                                        config.threads);
  if (rep.finite_fit)
    rep.nu_ratio = prefactor_ratio_nu(rep.finite_fit->slope, rep.infinite_fit.slope());

  if (config.sizes.size() < 2) {
    rep.collapse_note = "collapse needs at least two sizes";
    return rep;
  }
  std::vector<CollapseSeries> series;
  for (long n : config.sizes)
    series.push_back(collapse_series(make_params(FiniteOdd{n}, config.gamma, 1.0), config.r,
                                     config.order, rep.lambda_m_per_n.at(n).lambda,
                                     config.lambda_0, config.collapse_points_per_side,
                                     config.collapse_window, config.step, config.threads));
  const double q_inf = rep.infinite_fit.slope();
  rep.collapse_at_nu1 = collapse(series, config.lambda_0, 1.0, q_inf);
  rep.nu_fit = fit_nu(series, config.lambda_0, q_inf);
  rep.collapse_at_fit = collapse(series, config.lambda_0, rep.nu_fit->nu, q_inf);

  // Large-x tail of the collapsed curve, from the largest size where the
  // scaling regime is widest: x in [5, 0.02 N].
  const long n_top = config.sizes.back();
  std::vector<double> xs, ys;
  for (const auto& p : rep.collapse_at_nu1->q_samples)
    if (p.n == n_top && p.x >= 5.0 && p.x <= 0.02 * static_cast<double>(n_top)) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
  if (xs.size() >= 3) rep.q_tail_fit = fit_log(xs, ys);
  return rep;
}

Extremum c2_maximum(const ModelParams& params) {
  const double w = window_half_width(params.sites(), params.gamma());
  const auto grid = linspace(1.0 - w, 1.0 + w, 81);
  return find_maximum(concurrence_observable(params, 2), grid);
}

C2Report c2_analysis(const std::vector<long>& sizes, double window_lo, double window_hi,
                     unsigned threads) {
  C2Report rep;
  const auto maxima = parallel_map(sizes.size(), threads, [&](std::size_t i) {
    return c2_maximum(make_params(FiniteOdd{sizes[i]}, 1.0, 1.0));
  });
  for (std::size_t i = 0; i < sizes.size(); ++i) rep.maxima[sizes[i]] = maxima[i];
  SuiteConfig cfg;
  cfg.gamma = 1.0;
  cfg.r = 2;
  cfg.order = 2;
  cfg.sizes = sizes;
  cfg.shift_sizes = {};
  cfg.window_lo = window_lo;
  cfg.window_hi = window_hi;
  cfg.threads = threads;
  rep.collapse = scaling_suite(cfg);
  rep.second_derivative_slope = rep.collapse.infinite_fit;
  return rep;
}

}  // namespace xyent
