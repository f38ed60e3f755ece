#include <doctest.h>

#include <cmath>
#include <numbers>

#include "xyent/ed_oracle.hpp"
#include "xyent/fermion.hpp"

using namespace xyent;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::BadConfig;
}

}  // namespace

TEST_CASE("field-only limit") {
  for (double gamma : {0.25, 1.0}) {
    const auto fin = make_params(FiniteOdd{9}, gamma, 0.0);
    CHECK(finite_g(fin, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(infinite_g(gamma, 0.0, 0) == finite_g(fin, 0));
    const auto c = correlators(fin, 3);
    CHECK(c.mz == doctest::Approx(1.0));
    for (int r = 1; r <= 3; ++r) {
      CHECK(c.zz(r) == doctest::Approx(1.0));
      CHECK(std::abs(c.xx(r)) < 1e-14);
      CHECK(std::abs(c.yy(r)) < 1e-14);
    }
  }
}

TEST_CASE("G values are bounded") {
  for (double lambda : {0.3, 1.0, 3.0}) {
    const auto g = make_gfunction(make_params(FiniteOdd{21}, 0.5, lambda), 6);
    const auto gi = make_gfunction(make_params(Infinite{}, 0.5, lambda), 6);
    for (int n = -6; n <= 6; ++n) {
      CHECK(std::abs(g.at(n)) <= 1.0 + 1e-12);
      CHECK(std::abs(gi.at(n)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("critical Ising magnetization is 2/pi") {
  CHECK(std::abs(infinite_g(1.0, 1.0, 0) + 2.0 / std::numbers::pi) < 1e-12);
}

TEST_CASE("finite chain converges to the infinite chain") {
  const double lambda = 0.99;
  const double g_inf = infinite_g(1.0, lambda, 1);
  double previous = INFINITY;
  for (long n : {101L, 401L, 1601L}) {
    const double dev = std::abs(finite_g(make_params(FiniteOdd{n}, 1.0, lambda), 1) - g_inf);
    CHECK(dev < previous);
    previous = dev;
  }
  for (long n : {401L, 801L}) {
    CHECK(std::abs(finite_g(make_params(FiniteOdd{n}, 1.0, 0.5), 1) - infinite_g(1.0, 0.5, 1)) < 1e-6);
  }
  CHECK(std::abs(finite_g(make_params(FiniteOdd{2701}, 0.5, 2.0), 3) - infinite_g(0.5, 2.0, 3)) < 1e-8);
}

TEST_CASE("N = 2701 correlators match the infinite chain off criticality") {
  for (double gamma : {0.5, 1.0}) {
    for (double lambda : {0.5, 2.0}) {
      const auto a = correlators(make_params(FiniteOdd{2701}, gamma, lambda), 3);
      const auto b = correlators(make_params(Infinite{}, gamma, lambda), 3);
      CHECK(std::abs(a.mz - b.mz) < 1e-7);
      for (int r = 1; r <= 3; ++r) {
        CHECK(std::abs(a.xx(r) - b.xx(r)) < 1e-7);
        CHECK(std::abs(a.yy(r) - b.yy(r)) < 1e-7);
        CHECK(std::abs(a.zz(r) - b.zz(r)) < 1e-7);
      }
    }
  }
}

TEST_CASE("critical xx(1) agrees with extrapolated finite chains") {
  // Finite-size corrections at criticality go as 1/N^2; extrapolate in 1/N^2.
  auto xx = [](long n) { return correlators(make_params(FiniteOdd{n}, 1.0, 1.0), 1).xx(1); };
  const double n1 = 801, n2 = 1601;
  const double extrapolated = (n2 * n2 * xx(1601) - n1 * n1 * xx(801)) / (n2 * n2 - n1 * n1);
  const double previous = (n1 * n1 * xx(801) - 401.0 * 401.0 * xx(401)) / (n1 * n1 - 401.0 * 401.0);
  const double infinite = correlators(make_params(Infinite{}, 1.0, 1.0), 1).xx(1);
  CHECK(std::abs(extrapolated - previous) < 1e-6);
  CHECK(std::abs(extrapolated - infinite) < 1e-6);
}

TEST_CASE("quadrature tolerance halving") {
  for (double lambda : {0.2, 0.999, 1.0, 1.3}) {
    for (int n : {-2, 0, 3}) {
      const double a = infinite_g(0.5, lambda, n, kQuadratureTolerance);
      const double b = infinite_g(0.5, lambda, n, kQuadratureTolerance / 2);
      CHECK(std::abs(a - b) < kQuadratureTolerance);
    }
  }
}

TEST_CASE("zz clusters to mz^2 at r = 50") {
  for (double lambda : {0.5, 1.0, 1.5}) {
    const auto c = correlators(make_params(Infinite{}, 1.0, lambda), 50);
    CHECK(std::abs(c.zz(50) - c.mz * c.mz) < 1e-3);
  }
}

TEST_CASE("magnetization stays nonzero at strong coupling") {
  const double mz = magnetization(make_gfunction(make_params(Infinite{}, 1.0, 5.0), 0));
  CHECK(mz > 0.0);
  CHECK(mz < 1.0);
}

TEST_CASE("selected parity sector has the lower energy") {
  for (long n : {3L, 5L, 9L, 41L}) {
    for (double gamma : {0.25, 0.5, 1.0}) {
      for (double lambda : {0.0, 0.5, 0.9, 1.0, 1.1, 2.0, 4.0}) {
        const auto g = finite_gfunction(make_params(FiniteOdd{n}, gamma, lambda), 1);
        const auto& s = g.sectors;
        CHECK((s.even_selected ? s.even <= s.odd : s.odd < s.even));
      }
    }
  }
}

TEST_CASE("ordered side sign pattern") {
  // With the anisotropy on the yy bond the ordered phase has a large positive
  // yy correlation and a small negative xx correlation.
  const auto c = correlators(make_params(Infinite{}, 1.0, 1.2), 2);
  for (int r = 1; r <= 2; ++r) {
    CHECK(c.yy(r) > 0.0);
    CHECK(c.xx(r) < 0.0);
    CHECK(c.yy(r) > std::abs(c.xx(r)));
  }
  // Same pattern on the largest chain the oracle can solve.
  const auto gs = ed::solve(make_params(FiniteOdd{11}, 1.0, 1.2));
  CHECK(ed::correlator(gs, Axis::Y, 1, 2) > 0.0);
  CHECK(ed::correlator(gs, Axis::X, 1, 2) < 0.0);
}

TEST_CASE("errors") {
  const auto g = make_gfunction(make_params(FiniteOdd{9}, 1.0, 0.5), 1);
  CHECK(code_of([&] { two_point(g, Axis::X, 3); }) == ErrorCode::MissingGEntry);
  CHECK(code_of([&] { g.at(2); }) == ErrorCode::MissingGEntry);
  CHECK(code_of([] { correlators(make_params(FiniteOdd{5}, 1.0, 0.5), 3); }) ==
        ErrorCode::RMaxTooLarge);
  CHECK_NOTHROW(correlators(make_params(FiniteOdd{5}, 1.0, 0.5), 2));
}

TEST_CASE("default r_max") {
  CHECK(default_r_max(1.0) == 4);
  CHECK(default_r_max(0.5) == 6);
  CHECK(default_r_max(0.125) == 18);
}
