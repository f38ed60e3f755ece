#include "xyent/model.hpp"

#include <cmath>

namespace xyent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EvenN: return "EvenN";
    case ErrorCode::OutOfRangeGamma: return "OutOfRangeGamma";
    case ErrorCode::NegativeLambda: return "NegativeLambda";
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::SizeTooLarge: return "SizeTooLarge";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SameSite: return "SameSite";
    case ErrorCode::QuadratureNoConvergence: return "QuadratureNoConvergence";
    case ErrorCode::MissingGEntry: return "MissingGEntry";
    case ErrorCode::RMaxTooLarge: return "RMaxTooLarge";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::SpectrumInconsistent: return "SpectrumInconsistent";
    case ErrorCode::StepTooSmall: return "StepTooSmall";
    case ErrorCode::NoInteriorMinimum: return "NoInteriorMinimum";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::SignChange: return "SignChange";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::FlatObjective: return "FlatObjective";
    case ErrorCode::MissingSeries: return "MissingSeries";
    case ErrorCode::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

std::string to_string(const ChainSize& size) {
  if (const auto* f = std::get_if<FiniteOdd>(&size)) return std::to_string(f->n);
  return "inf";
}

long ModelParams::sites() const {
  if (const auto* f = std::get_if<FiniteOdd>(&size_)) return f->n;
  throw Error(ErrorCode::InvalidSize, "infinite chain has no site count");
}

ModelParams ModelParams::with_lambda(double lambda) const {
  RawParams r = raw();
  r.lambda = lambda;
  return validate(r);
}

RawParams ModelParams::raw() const {
  RawParams r;
  if (const auto* f = std::get_if<FiniteOdd>(&size_)) r.n = f->n;
  r.gamma = gamma_;
  r.lambda = lambda_;
  return r;
}

ModelParams validate(const RawParams& raw) {
  ChainSize size = Infinite{};
  if (raw.n) {
    const long n = *raw.n;
    if (n < 3)
      throw Error(ErrorCode::InvalidSize,
                  "N = " + std::to_string(n) + " (need an odd N >= 3)");
    if (n % 2 == 0)
      throw Error(ErrorCode::EvenN, "N = " + std::to_string(n) + " is even");
    size = FiniteOdd{n};
  }
  if (!(raw.gamma > 0.0 && raw.gamma <= 1.0))
    throw Error(ErrorCode::OutOfRangeGamma,
                "gamma = " + std::to_string(raw.gamma) + " outside (0, 1]");
  if (!(raw.lambda >= 0.0) || !std::isfinite(raw.lambda))
    throw Error(ErrorCode::NegativeLambda,
                "lambda = " + std::to_string(raw.lambda) + " must be >= 0");
  return ModelParams(size, raw.gamma, raw.lambda);
}

ModelParams make_params(const ChainSize& size, double gamma, double lambda) {
  RawParams r;
  if (const auto* f = std::get_if<FiniteOdd>(&size)) r.n = f->n;
  r.gamma = gamma;
  r.lambda = lambda;
  return validate(r);
}

}  // namespace xyent
