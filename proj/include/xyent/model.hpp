#ifndef XYENT_MODEL_HPP
#define XYENT_MODEL_HPP

#include <optional>
#include <string>
#include <variant>

#include "xyent/error.hpp"

namespace xyent {

/// Periodic chain of an odd number of sites (N >= 3).
struct FiniteOdd {
  long n;
  friend bool operator==(const FiniteOdd&, const FiniteOdd&) = default;
};

/// Thermodynamic limit; correlators come from momentum integrals.
struct Infinite {
  friend bool operator==(const Infinite&, const Infinite&) = default;
};

using ChainSize = std::variant<FiniteOdd, Infinite>;

std::string to_string(const ChainSize& size);

enum class Axis { X, Y, Z };

struct CriticalConstants {
  static constexpr double lambda_c = 1.0;
  static constexpr double nu = 1.0;
};

/// Unvalidated parameter record as it arrives from flags or a config file.
/// An empty `n` means the infinite chain.
struct RawParams {
  std::optional<long> n;
  double gamma = 1.0;
  double lambda = 0.0;
};

/// Validated parameters of
///
///   H = -(lambda/2) sum_i [(1-gamma) sx_i sx_{i+1} + (1+gamma) sy_i sy_{i+1}]
///       - sum_i sz_i
///
/// with periodic boundaries and the field fixed to unity. The anisotropy sits
/// on the yy bond (gamma = 1 couples only sy sy); relabelling x <-> y maps this
/// onto the more common convention without changing sz, concurrence or any
/// scaling quantity. The critical point is lambda = 1 for every gamma.
class ModelParams {
 public:
  const ChainSize& size() const noexcept { return size_; }
  double gamma() const noexcept { return gamma_; }
  double lambda() const noexcept { return lambda_; }

  bool is_infinite() const noexcept {
    return std::holds_alternative<Infinite>(size_);
  }
  /// Number of sites; throws InvalidSize for the infinite chain.
  long sites() const;

  /// Coupling in front of -sx_i sx_{i+1}.
  double coupling_x() const noexcept { return 0.5 * lambda_ * (1.0 - gamma_); }
  /// Coupling in front of -sy_i sy_{i+1}.
  double coupling_y() const noexcept { return 0.5 * lambda_ * (1.0 + gamma_); }

  ModelParams with_lambda(double lambda) const;
  RawParams raw() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  ModelParams(ChainSize size, double gamma, double lambda)
      : size_(size), gamma_(gamma), lambda_(lambda) {}
  friend ModelParams validate(const RawParams&);

  ChainSize size_;
  double gamma_;
  double lambda_;
};

/// Throws Error{EvenN | InvalidSize | OutOfRangeGamma | NegativeLambda}.
ModelParams validate(const RawParams& raw);
inline ModelParams validate(const ModelParams& p) { return validate(p.raw()); }

ModelParams make_params(const ChainSize& size, double gamma, double lambda);

}  // namespace xyent

#endif
