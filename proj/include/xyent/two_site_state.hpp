#ifndef XYENT_TWO_SITE_STATE_HPP
#define XYENT_TWO_SITE_STATE_HPP

#include <Eigen/Dense>

namespace xyent {

/// Two-spin reduced density matrix, real symmetric, in the ordered basis
/// {up-up, up-down, down-up, down-down} (index = 2*b_i + b_j, b = 1 for down).
struct TwoSiteState {
  Eigen::Matrix4d rho = Eigen::Matrix4d::Zero();
};

/// Deviations of a TwoSiteState from the invariants it must satisfy.
struct StateDiagnostics {
  double trace_error = 0.0;      // |tr rho - 1|
  double symmetry_error = 0.0;   // max |rho - rho^T|
  double min_eigenvalue = 0.0;
  double structure_error = 0.0;  // max |forbidden entry|, plus |rho22 - rho33|

  bool ok(double tol_trace = 1e-12, double tol_sym = 1e-12,
          double tol_eig = 1e-10, double tol_struct = 1e-10) const {
    return trace_error <= tol_trace && symmetry_error <= tol_sym &&
           min_eigenvalue >= -tol_eig && structure_error <= tol_struct;
  }
};

StateDiagnostics diagnose(const TwoSiteState& state);

}  // namespace xyent

#endif
