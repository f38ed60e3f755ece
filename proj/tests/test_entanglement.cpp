#include <doctest.h>

#include <algorithm>
#include <complex>

#include <Eigen/Eigenvalues>

#include "xyent/ed_oracle.hpp"
#include "xyent/entanglement.hpp"

using namespace xyent;

namespace {

// Concurrence straight from the definition: complex sigma_y (x) sigma_y,
// general (non-symmetric) eigensolver on rho * rho~.
double brute_concurrence(const Eigen::Matrix4d& rho) {
  using C = std::complex<double>;
  Eigen::Matrix2cd sy;
  sy << C(0, 0), C(0, -1), C(0, 1), C(0, 0);
  Eigen::Matrix4cd yy;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) yy(2 * a + c, 2 * b + d) = sy(a, b) * sy(c, d);
  const Eigen::Matrix4cd rc = rho.cast<C>();
  const Eigen::Matrix4cd flipped = yy * rc.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rc * flipped);
  std::vector<double> roots;
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(es.eigenvalues()[i].imag()) < 1e-10);
    roots.push_back(std::sqrt(std::max(0.0, es.eigenvalues()[i].real())));
  }
  std::sort(roots.rbegin(), roots.rend());
  return std::max(0.0, roots[0] - roots[1] - roots[2] - roots[3]);
}

TwoSiteState werner(double p) {
  TwoSiteState s;
  s.rho = (1.0 - p) / 4.0 * Eigen::Matrix4d::Identity();
  s.rho(1, 1) += p / 2;
  s.rho(2, 2) += p / 2;
  s.rho(1, 2) -= p / 2;
  s.rho(2, 1) -= p / 2;
  return s;
}

TwoSiteState bell_phi_plus() {
  TwoSiteState s;
  s.rho(0, 0) = s.rho(3, 3) = s.rho(0, 3) = s.rho(3, 0) = 0.5;
  return s;
}

CorrelatorSet synthetic(double mz, double xx, double yy, double zz) {
  return CorrelatorSet{make_params(FiniteOdd{9}, 1.0, 0.5), mz, {xx}, {yy}, {zz}};
}

std::vector<double> linear(double lo, double hi, int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
  return g;
}

}  // namespace

TEST_CASE("textbook states") {
  CHECK(concurrence(bell_phi_plus()) == doctest::Approx(1.0).epsilon(1e-12));
  TwoSiteState mixed;
  mixed.rho = Eigen::Matrix4d::Identity() / 4;
  CHECK(concurrence(mixed) == 0.0);
}

TEST_CASE("Werner states against the brute-force oracle") {
  const auto w = werner(0.9);
  CHECK(brute_concurrence(w.rho) == doctest::Approx(0.85).epsilon(1e-12));
  CHECK(concurrence(w) == doctest::Approx(brute_concurrence(w.rho)).epsilon(1e-12));
  for (double p : {0.0, 0.1, 0.2, 0.33}) CHECK(concurrence(werner(p)) == 0.0);
  CHECK(concurrence(werner(1.0 / 3.0)) < 1e-15);
  for (double p : {0.34, 0.5, 0.75, 1.0})
    CHECK(std::abs(concurrence(werner(p)) - brute_concurrence(werner(p).rho)) < 1e-12);
}

TEST_CASE("spin flip") {
  TwoSiteState up;
  up.rho(0, 0) = 1.0;
  Eigen::Matrix4d down = Eigen::Matrix4d::Zero();
  down(3, 3) = 1.0;
  CHECK((spin_flip(up) - down).cwiseAbs().maxCoeff() == 0.0);
  TwoSiteState mixed;
  mixed.rho = Eigen::Matrix4d::Identity() / 4;
  CHECK((spin_flip(mixed) - mixed.rho).cwiseAbs().maxCoeff() == 0.0);
  const auto bell = bell_phi_plus();
  CHECK((spin_flip(bell) - bell.rho).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("assembled density matrices of simple correlators") {
  Eigen::Matrix4d polarized = Eigen::Matrix4d::Zero();
  polarized(0, 0) = 1.0;
  CHECK((assemble_rdm(synthetic(1, 0, 0, 1), 1).rho - polarized).cwiseAbs().maxCoeff() == 0.0);
  CHECK((assemble_rdm(synthetic(0, 0, 0, 0), 1).rho - Eigen::Matrix4d::Identity() / 4)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  try {
    assemble_rdm(synthetic(1, 0, 0, -1), 1);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositive);
  }
}

TEST_CASE("unphysical spectrum is rejected") {
  TwoSiteState bad;
  bad.rho(0, 0) = 1.5;
  bad.rho(1, 1) = -0.5;
  try {
    concurrence(bad);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpectrumInconsistent);
  }
}

TEST_CASE("wootters roots agree with the general eigensolver on chain states") {
  for (double lambda : {0.4, 0.9, 1.0, 1.6}) {
    const auto c = correlators(make_params(Infinite{}, 0.5, lambda), 3);
    for (int r = 1; r <= 3; ++r) {
      const auto s = assemble_rdm(c, r);
      CHECK(std::abs(concurrence(s) - brute_concurrence(s.rho)) < 1e-10);
    }
  }
}

TEST_CASE("relabelling x and y leaves concurrence unchanged") {
  for (double lambda : {0.5, 1.0, 1.3}) {
    auto c = correlators(make_params(FiniteOdd{41}, 1.0, lambda), 2);
    const double c1 = concurrence(assemble_rdm(c, 1));
    const double c2 = concurrence(assemble_rdm(c, 2));
    std::swap(c.gxx, c.gyy);
    CHECK(std::abs(concurrence(assemble_rdm(c, 1)) - c1) < 1e-14);
    CHECK(std::abs(concurrence(assemble_rdm(c, 2)) - c2) < 1e-14);
  }
}

TEST_CASE("assembled rdm and concurrence match the oracle") {
  for (long n : {5L, 9L}) {
    for (double lambda : {0.5, 1.0, 2.0}) {
      const auto p = make_params(FiniteOdd{n}, 0.5, lambda);
      const auto gs = ed::solve(p);
      const auto c = correlators(p, 2);
      for (int r = 1; r <= 2; ++r) {
        const auto a = ed::reduced_density_matrix(gs, 2, 2 + r);
        const auto b = assemble_rdm(c, r);
        CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(std::abs(concurrence(a) - concurrence(b)) < 1e-8);
      }
    }
  }
}

TEST_CASE("nearest-neighbour concurrence peaks below criticality") {
  const auto grid = linear(0.0, 2.0, 81);
  const auto curve = concurrence_profile(make_params(Infinite{}, 1.0, 0.0), 3, grid);
  const auto& c1 = curve.at(1);
  const auto it = std::max_element(c1.begin(), c1.end());
  CHECK(grid[static_cast<std::size_t>(it - c1.begin())] < 1.0);
  CHECK(*it < 1.0);
  CHECK(*it > 0.0);
  for (const auto& [r, values] : curve.c_values)
    for (double v : values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  CHECK(std::is_sorted(curve.lambda_grid.begin(), curve.lambda_grid.end()));
}

TEST_CASE("third-neighbour concurrence") {
  const auto grid = linear(0.0, 3.0, 121);
  for (long n : {9L, 11L, 41L}) {
    const auto curve = concurrence_profile(make_params(FiniteOdd{n}, 1.0, 0.0), 3, grid);
    CHECK(*std::max_element(curve.at(3).begin(), curve.at(3).end()) <= kRangeThreshold);
  }
  const auto curve = concurrence_profile(make_params(FiniteOdd{7}, 1.0, 0.0), 3, linear(1.06, 3.0, 98));
  CHECK(*std::max_element(curve.at(3).begin(), curve.at(3).end()) > kRangeThreshold);
}

TEST_CASE("entanglement range") {
  const auto grid = linear(0.0, 2.0, 101);
  CHECK(entanglement_range(make_params(FiniteOdd{41}, 1.0, 0.0), grid) == 2);
  CHECK(entanglement_range(make_params(FiniteOdd{41}, 1.0, 0.0), {0.0}) == 0);
  CHECK(entanglement_range(make_params(Infinite{}, 0.5, 0.0), {0.0}) == 0);
}

TEST_CASE("total concurrence") {
  CHECK(total_concurrence(make_params(Infinite{}, 1.0, 0.0), 0.0) == 0.0);
  double previous = 0.0;
  for (double gamma : {0.25, 0.5, 1.0}) {
    const double total = total_concurrence(make_params(Infinite{}, gamma, 1.0), 1.0);
    CHECK(total > 0.0);
    CHECK(total < 0.2);
    CHECK(total >= previous);
    previous = total;
  }
}
