#ifndef XYENT_FERMION_HPP
#define XYENT_FERMION_HPP

// Exact ground-state correlators through the Jordan-Wigner mapping.
//
// With Majorana operators a_j = (prod_{l<j} sz_l) sx_j and
// b_j = (prod_{l<j} sz_l) sy_j the Hamiltonian is i sum_{jl} a_j T_{jl} b_l,
// T circulant with symbol D(k) = 1 - lambda cos k - i lambda gamma sin k.
// The ground state fixes the contraction
//
//   G(n) = <i a_j b_{j+n}> = -(1/N) sum_k s_k cos(k n - arg D(k)),
//
// (s_k = -1 only for a mode flipped to meet the parity constraint), and every
// spin correlator is a determinant of G values:
//
//   <sz>            = -G(0)
//   <sx_j sx_{j+r}> = det[G(i - j - 1)]_{r x r}
//   <sy_j sy_{j+r}> = det[G(i - j + 1)]_{r x r}
//   <sz_j sz_{j+r}> = G(0)^2 - G(r) G(-r)
//
// The periodic chain splits into sz-parity sectors: even parity uses
// antiperiodic momenta k = 2 pi (m + 1/2) / N, odd parity periodic momenta
// k = 2 pi m / N. Both are solved and the lower energy wins (ties: even).

#include <vector>

#include "xyent/model.hpp"

namespace xyent {

enum class GSource { FiniteMomentumSum, InfiniteQuadrature };

struct SectorEnergies {
  double even = 0.0;  // ground energy in the sz-parity +1 sector
  double odd = 0.0;   // ground energy in the sz-parity -1 sector
  bool even_selected = true;
};

/// G(n) on a symmetric window of separations [-reach, reach].
class GFunction {
 public:
  GFunction(GSource source, int reach, std::vector<double> values);

  GSource source() const noexcept { return source_; }
  int reach() const noexcept { return reach_; }
  bool contains(int n) const noexcept { return n >= -reach_ && n <= reach_; }
  /// Throws MissingGEntry outside the window.
  double at(int n) const;

  /// Only meaningful for finite chains.
  SectorEnergies sectors;
  /// Summed quadrature error estimate (infinite chain only).
  double error_estimate = 0.0;

 private:
  GSource source_;
  int reach_;
  std::vector<double> values_;
};

/// Which parity sector a finite chain's state comes from. Lowest is the
/// ground state; Even/Odd follow one sector's lowest state through level
/// crossings (used to differentiate along a single branch).
enum class ParitySector { Lowest, Even, Odd };

inline constexpr double kQuadratureTolerance = 1e-11;

/// G(n) for a finite odd chain.
double finite_g(const ModelParams& params, int n);
GFunction finite_gfunction(const ModelParams& params, int reach,
                           ParitySector sector = ParitySector::Lowest);

/// Even or Odd: the sector of the finite-chain ground state. Lowest for the
/// infinite chain.
ParitySector ground_sector(const ModelParams& params);

/// G(n) for the infinite chain by adaptive Gauss-Kronrod quadrature over
/// [0, pi], with panels graded geometrically towards k = 0 where the
/// integrand varies on the scale |1 - lambda|. Throws QuadratureNoConvergence
/// when the summed error estimate exceeds `tolerance`.
double infinite_g(double gamma, double lambda, int n,
                  double tolerance = kQuadratureTolerance);
GFunction infinite_gfunction(double gamma, double lambda, int reach,
                             double tolerance = kQuadratureTolerance);

/// Dispatch on the chain size.
GFunction make_gfunction(const ModelParams& params, int reach,
                         ParitySector sector = ParitySector::Lowest);

/// <sigma^a_j sigma^a_{j+r}> from Toeplitz determinants of G.
/// Throws MissingGEntry when the window is too small.
double two_point(const GFunction& g, Axis axis, int r);

/// <sigma^z>.
double magnetization(const GFunction& g);

/// Sabotage switch used to prove the oracle comparison detects a wrong sign.
enum class ConventionPerturbation { None, FlipXX };

struct CorrelatorSet {
  ModelParams params;
  double mz = 0.0;
  std::vector<double> gxx, gyy, gzz;  // index r - 1

  int r_max() const noexcept { return static_cast<int>(gxx.size()); }
  double xx(int r) const { return gxx.at(static_cast<std::size_t>(r - 1)); }
  double yy(int r) const { return gyy.at(static_cast<std::size_t>(r - 1)); }
  double zz(int r) const { return gzz.at(static_cast<std::size_t>(r - 1)); }
};

/// max(3, ceil(2 / gamma) + 2).
int default_r_max(double gamma);

/// Magnetization and all two-point functions up to r_max from one G
/// evaluation. Finite chains need r_max < N / 2 (RMaxTooLarge otherwise).
CorrelatorSet correlators(const ModelParams& params, int r_max,
                          ConventionPerturbation perturb = ConventionPerturbation::None,
                          ParitySector sector = ParitySector::Lowest);

}  // namespace xyent

#endif
