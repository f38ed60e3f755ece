#include <doctest.h>

#include "xyent/model.hpp"

using namespace xyent;

namespace {

ErrorCode code_of(const RawParams& raw) {
  try {
    validate(raw);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("validate accepted the record");
  return ErrorCode::BadConfig;
}

}  // namespace

TEST_CASE("in-range parameters validate") {
  const auto p = validate(RawParams{11, 1.0, 0.8});
  CHECK(p.sites() == 11);
  CHECK(p.gamma() == 1.0);
  CHECK(p.lambda() == 0.8);
  CHECK_FALSE(p.is_infinite());
}

TEST_CASE("rejections name the rule") {
  CHECK(code_of({10, 1.0, 0.8}) == ErrorCode::EvenN);
  CHECK(code_of({41, 0.0, 1.0}) == ErrorCode::OutOfRangeGamma);
  CHECK(code_of({41, 1.5, 1.0}) == ErrorCode::OutOfRangeGamma);
  CHECK(code_of({41, 1.0, -0.1}) == ErrorCode::NegativeLambda);
  CHECK(code_of({1, 1.0, 0.5}) == ErrorCode::InvalidSize);
  CHECK(code_of({-3, 1.0, 0.5}) == ErrorCode::InvalidSize);
}

TEST_CASE("error message names the offending field") {
  try {
    validate(RawParams{41, 0.0, 1.0});
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
}

TEST_CASE("validate is idempotent") {
  for (const RawParams raw : {RawParams{3, 0.25, 0.0}, RawParams{11, 1.0, 0.8},
                              RawParams{std::nullopt, 0.5, 2.0}}) {
    const auto once = validate(raw);
    CHECK(validate(once) == once);
  }
}

TEST_CASE("infinite chain") {
  const auto p = make_params(Infinite{}, 0.5, 1.0);
  CHECK(p.is_infinite());
  CHECK_THROWS_AS(p.sites(), Error);
  CHECK(to_string(p.size()) == "inf");
}

TEST_CASE("couplings put the anisotropy on the yy bond") {
  const auto p = make_params(FiniteOdd{5}, 1.0, 0.6);
  CHECK(p.coupling_x() == doctest::Approx(0.0));
  CHECK(p.coupling_y() == doctest::Approx(0.6));
  CHECK(CriticalConstants::lambda_c == 1.0);
}
