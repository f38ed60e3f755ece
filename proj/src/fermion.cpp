#include "xyent/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace xyent {

namespace {

constexpr double kPi = std::numbers::pi;

struct Mode {
  double k;
  double cos_theta;  // Re D / |D|
  double sin_theta;  // Im D / |D|
  double abs_d;
  double sign;       // +1 occupied as in the unconstrained ground state
};

// D(k) = 1 - lambda cos k - i lambda gamma sin k. The real part is written
// without the cancellation of 1 - lambda cos k near k = 0, lambda = 1.
void symbol(double gamma, double lambda, double k, double& re, double& im) {
  const double s = std::sin(0.5 * k);
  re = (1.0 - lambda) + 2.0 * lambda * s * s;
  im = -lambda * gamma * std::sin(k);
}

struct Sector {
  std::vector<Mode> modes;
  double energy = 0.0;
};

// `even` selects the sz-parity +1 sector (antiperiodic momenta).
Sector solve_sector(long n, double gamma, double lambda, bool even) {
  Sector s;
  s.modes.reserve(static_cast<std::size_t>(n));
  const double shift = even ? 0.5 : 0.0;
  double parity_sign = 1.0;  // product of real D over unpaired momenta
  std::size_t unpaired = 0;
  for (long m = 0; m < n; ++m) {
    const double k = 2.0 * kPi * (static_cast<double>(m) + shift) / static_cast<double>(n);
    double re, im;
    symbol(gamma, lambda, k, re, im);
    // k = 0 (odd sector) or k = pi (even sector, odd N) pairs with itself.
    const bool self_paired = even ? (2 * m + 1 == n) : (m == 0);
    if (self_paired) {
      im = 0.0;
      unpaired = s.modes.size();
      parity_sign = re > 0.0 ? 1.0 : -1.0;
    }
    const double a = std::hypot(re, im);
    Mode md{k, 1.0, 0.0, a, 1.0};
    if (a > 0.0) {
      md.cos_theta = re / a;
      md.sin_theta = im / a;
    }
    s.modes.push_back(md);
  }
  // The unconstrained Majorana ground state has sz-parity sign(det T); if it
  // disagrees with the sector, the self-paired mode is flipped.
  const double wanted = even ? 1.0 : -1.0;
  if (parity_sign != wanted) s.modes[unpaired].sign = -1.0;
  for (const auto& md : s.modes) s.energy -= md.sign * md.abs_d;
  return s;
}

double sector_g(const Sector& s, long n_sites, int n) {
  double acc = 0.0;
  for (const auto& md : s.modes) {
    const double kn = md.k * n;
    acc += md.sign * (std::cos(kn) * md.cos_theta + std::sin(kn) * md.sin_theta);
  }
  return -acc / static_cast<double>(n_sites);
}

struct Selected {
  Sector sector;
  SectorEnergies energies;
};

Selected select_sector(const ModelParams& params, ParitySector want = ParitySector::Lowest) {
  const long n = params.sites();
  Sector even = solve_sector(n, params.gamma(), params.lambda(), true);
  Sector odd = solve_sector(n, params.gamma(), params.lambda(), false);
  SectorEnergies e{even.energy, odd.energy, even.energy <= odd.energy};
  const bool use_even = want == ParitySector::Lowest ? e.even_selected : want == ParitySector::Even;
  return {use_even ? std::move(even) : std::move(odd), e};
}

// Lower edge of the geometric panel grading near k = 0. Below |1 - lambda|
// the symbol D(k) changes on scale |1-lambda|/(lambda gamma) or
// sqrt(|1-lambda|), whichever is smaller.
double grading_floor(double gamma, double lambda) {
  const double dist = std::abs(1.0 - lambda);
  if (dist < 1e-14 || lambda == 0.0) return 1e-3;
  const double scale =
      std::min(dist / std::max(lambda * gamma, 1e-300), std::sqrt(dist));
  return std::clamp(0.25 * scale, 1e-10, 0.5);
}

std::vector<double> panel_edges(double gamma, double lambda) {
  std::vector<double> edges{kPi};
  const double floor = grading_floor(gamma, lambda);
  double k = kPi;
  while (k > floor) {
    k *= 0.5;
    edges.push_back(k);
  }
  edges.push_back(0.0);
  std::reverse(edges.begin(), edges.end());
  return edges;
}

// At lambda = 0 the ground state is the fully polarized product state.
double product_state_g(int n) { return n == 0 ? -1.0 : 0.0; }

double determinant_of(const Eigen::MatrixXd& m) {
  switch (m.rows()) {
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3: return Eigen::Matrix3d(m).determinant();
    default: return m.partialPivLu().determinant();
  }
}

}  // namespace

GFunction::GFunction(GSource source, int reach, std::vector<double> values)
    : source_(source), reach_(reach), values_(std::move(values)) {
  if (reach < 0 || values_.size() != static_cast<std::size_t>(2 * reach + 1))
    throw Error(ErrorCode::MissingGEntry, "G window size does not match its reach");
}

double GFunction::at(int n) const {
  if (!contains(n))
    throw Error(ErrorCode::MissingGEntry,
                "G(" + std::to_string(n) + ") outside window of reach " +
                    std::to_string(reach_));
  return values_[static_cast<std::size_t>(n + reach_)];
}

double finite_g(const ModelParams& params, int n) {
  if (params.lambda() == 0.0) return product_state_g(n);
  const Selected sel = select_sector(params);
  return sector_g(sel.sector, params.sites(), n);
}

GFunction finite_gfunction(const ModelParams& params, int reach, ParitySector sector) {
  const Selected sel = select_sector(params, sector);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(2 * reach + 1));
  for (int n = -reach; n <= reach; ++n)
    values.push_back(params.lambda() == 0.0 ? product_state_g(n)
                                            : sector_g(sel.sector, params.sites(), n));
  GFunction g(GSource::FiniteMomentumSum, reach, std::move(values));
  g.sectors = sel.energies;
  return g;
}

namespace {

// 61-point Kronrod rule on [a, b], bisected while the Gauss/Kronrod gap
// exceeds the budget or the roundoff floor of the panel. Boost's own adaptive
// driver is avoided because its error estimate accumulates that floor per leaf.
template <class F>
double integrate_panel(const F& f, double a, double b, double budget, int depth,
                       double& error) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  double l1 = 0.0;
  const double v = gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, &err, &l1);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  if (err <= std::max(budget, floor) || depth == 0) {
    error += err;
    return v;
  }
  const double mid = 0.5 * (a + b);
  return integrate_panel(f, a, mid, 0.5 * budget, depth - 1, error) +
         integrate_panel(f, mid, b, 0.5 * budget, depth - 1, error);
}

double infinite_g_with_error(double gamma, double lambda, int n, double tolerance,
                             double& error_out) {
  error_out = 0.0;
  if (lambda == 0.0) return product_state_g(n);
  auto integrand = [gamma, lambda, n](double k) {
    double re, im;
    symbol(gamma, lambda, k, re, im);
    const double a = std::hypot(re, im);
    if (a == 0.0) return std::cos(k * n);
    const double kn = k * n;
    return (std::cos(kn) * re + std::sin(kn) * im) / a;
  };
  const auto edges = panel_edges(gamma, lambda);
  // Each panel gets an equal share of an absolute budget well below the
  // acceptance tolerance; fixed rules keep the result smooth in lambda, which
  // finite-difference derivatives rely on.
  const double budget = kPi * 1e-13 / static_cast<double>(edges.size() - 1);
  double total = 0.0;
  double error = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p)
    total += integrate_panel(integrand, edges[p], edges[p + 1], budget, 20, error);
  error_out = error / kPi;
  if (!(error_out <= tolerance))
    throw Error(ErrorCode::QuadratureNoConvergence,
                "G(" + std::to_string(n) + ") error estimate " +
                    std::to_string(error_out) + " above " + std::to_string(tolerance));
  return -total / kPi;
}

}  // namespace

double infinite_g(double gamma, double lambda, int n, double tolerance) {
  double err = 0.0;
  return infinite_g_with_error(gamma, lambda, n, tolerance, err);
}

GFunction infinite_gfunction(double gamma, double lambda, int reach, double tolerance) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(2 * reach + 1));
  double total_error = 0.0;
  for (int n = -reach; n <= reach; ++n) {
    double err = 0.0;
    values.push_back(infinite_g_with_error(gamma, lambda, n, tolerance, err));
    total_error = std::max(total_error, err);
  }
  GFunction g(GSource::InfiniteQuadrature, reach, std::move(values));
  g.error_estimate = total_error;
  return g;
}

GFunction make_gfunction(const ModelParams& params, int reach, ParitySector sector) {
  if (params.is_infinite())
    return infinite_gfunction(params.gamma(), params.lambda(), reach);
  return finite_gfunction(params, reach, sector);
}

ParitySector ground_sector(const ModelParams& params) {
  if (params.is_infinite()) return ParitySector::Lowest;
  return select_sector(params).energies.even_selected ? ParitySector::Even : ParitySector::Odd;
}

double two_point(const GFunction& g, Axis axis, int r) {
  if (r < 1) throw Error(ErrorCode::SameSite, "separation must be >= 1");
  if (axis == Axis::Z) return g.at(0) * g.at(0) - g.at(r) * g.at(-r);
  const int offset = axis == Axis::X ? -1 : 1;
  if (!g.contains(-r + 1 + offset) || !g.contains(r - 1 + offset))
    throw Error(ErrorCode::MissingGEntry,
                "separation " + std::to_string(r) + " needs reach " +
                    std::to_string(r + 1));
  Eigen::MatrixXd m(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m(i, j) = g.at(i - j + offset);
  return determinant_of(m);
}

double magnetization(const GFunction& g) { return -g.at(0); }

int default_r_max(double gamma) {
  return std::max(3, static_cast<int>(std::ceil(2.0 / gamma)) + 2);
}

CorrelatorSet correlators(const ModelParams& params, int r_max,
                          ConventionPerturbation perturb, ParitySector sector) {
  if (r_max < 1) throw Error(ErrorCode::RMaxTooLarge, "r_max must be >= 1");
  if (!params.is_infinite() && 2 * static_cast<long>(r_max) >= params.sites())
    throw Error(ErrorCode::RMaxTooLarge,
                "r_max = " + std::to_string(r_max) + " needs N > " +
                    std::to_string(2 * r_max));
  const GFunction g = make_gfunction(params, r_max + 1, sector);
  CorrelatorSet out{params, magnetization(g), {}, {}, {}};
  for (int r = 1; r <= r_max; ++r) {
    double xx = two_point(g, Axis::X, r);
    if (perturb == ConventionPerturbation::FlipXX) xx = -xx;
    out.gxx.push_back(xx);
    out.gyy.push_back(two_point(g, Axis::Y, r));
    out.gzz.push_back(two_point(g, Axis::Z, r));
  }
  return out;
}

}  // namespace xyent
