#ifndef XYENT_ED_ORACLE_HPP
#define XYENT_ED_ORACLE_HPP

// Brute-force exact diagonalization of short periodic chains. It shares no
// code with the free-fermion solver and is the reference every sign
// convention there is checked against.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "xyent/model.hpp"
#include "xyent/two_site_state.hpp"

namespace xyent::ed {

inline constexpr long kMaxSites = 13;

/// Which bond carries (1 + gamma). The library convention is YY; XX exists
/// to check that relabelling leaves observables invariant.
enum class BondConvention { AnisotropyOnYY, AnisotropyOnXX };

using SparseMatrix = Eigen::SparseMatrix<double>;

struct DenseGroundState {
  double energy = 0.0;
  Eigen::VectorXd amplitudes;  // sigma^z product basis, bit s set = site s+1 down
  int sites = 0;
  // Lowest two levels closer than 1e-10: the selected state is ambiguous.
  bool gap_too_small = false;
};

/// Real symmetric 2^N x 2^N matrix of H in the sigma^z basis.
/// Throws SizeTooLarge for N > 13 and InvalidSize for the infinite chain.
SparseMatrix build_hamiltonian(
    const ModelParams& params,
    BondConvention convention = BondConvention::AnisotropyOnYY);

/// Lowest eigenpair with residual <= 1e-10 ||H||. Parity-conserving matrices
/// are split into the two sigma^z-parity blocks first. The global sign makes
/// the largest-magnitude amplitude positive.
DenseGroundState ground_state(const SparseMatrix& hamiltonian);

/// Convenience: build + solve.
DenseGroundState solve(const ModelParams& params,
                       BondConvention convention = BondConvention::AnisotropyOnYY);

/// Partial trace over every site except i and j (1-based, i != j).
TwoSiteState reduced_density_matrix(const DenseGroundState& state, int i, int j);

/// <sigma^a_i sigma^a_j>, 1-based sites, i != j.
double correlator(const DenseGroundState& state, Axis axis, int i, int j);

/// <sigma^z_i>.
double magnetization(const DenseGroundState& state, int i);

}  // namespace xyent::ed

#endif
