#include "xyent/ed_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <vector>

namespace xyent::ed {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kResidualTol = 1e-10;
constexpr double kGapWarn = 1e-10;
constexpr Eigen::Index kDenseLimit = 256;

int parity_of(Eigen::Index idx) {
  return std::popcount(static_cast<unsigned long>(idx)) & 1;
}

int sites_from_dim(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

double norm_estimate(const SparseMatrix& h) {
  double best = 0.0;
  VectorXd rows = VectorXd::Zero(h.rows());
  for (int k = 0; k < h.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(h, k); it; ++it)
      rows[it.row()] += std::abs(it.value());
  if (rows.size() > 0) best = rows.maxCoeff();
  return std::max(best, 1e-300);
}

struct Eigenpair {
  double value = 0.0;
  double second = std::numeric_limits<double>::infinity();
  VectorXd vector;
};

Eigenpair lowest_dense(const SparseMatrix& h) {
  const MatrixXd dense(h);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(dense);
  Eigenpair out;
  out.value = es.eigenvalues()[0];
  if (dense.rows() > 1) out.second = es.eigenvalues()[1];
  out.vector = es.eigenvectors().col(0);
  return out;
}

// Lanczos with full reorthogonalisation, restarted from the current Ritz
// vector if the Krylov space fills up before convergence.
Eigenpair lowest_lanczos(const SparseMatrix& h, double hnorm) {
  const Eigen::Index dim = h.rows();
  const Eigen::Index max_krylov = std::min<Eigen::Index>(dim, 250);
  constexpr int kRestarts = 8;

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXd start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start[i] = 1.0 + 0.1 * dist(rng);
  start.normalize();

  Eigenpair best;
  for (int restart = 0; restart < kRestarts; ++restart) {
    std::vector<VectorXd> basis;
    std::vector<double> alpha, beta;
    basis.push_back(start);
    for (Eigen::Index k = 0; k < max_krylov; ++k) {
      VectorXd w = h * basis[k];
      alpha.push_back(basis[k].dot(w));
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) w -= b.dot(w) * b;
      const double b_next = w.norm();

      const auto m = static_cast<Eigen::Index>(alpha.size());
      const bool check = (m % 5 == 0) || b_next < 1e-14 * hnorm || m == max_krylov;
      if (!check) {
        beta.push_back(b_next);
        basis.push_back(w / b_next);
        continue;
      }
      MatrixXd t = MatrixXd::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
      const double ritz_residual = std::abs(b_next * es.eigenvectors()(m - 1, 0));
      const bool done = ritz_residual <= 1e-2 * kResidualTol * hnorm ||
                        b_next < 1e-14 * hnorm || m == max_krylov;
      if (done) {
        VectorXd v = VectorXd::Zero(dim);
        for (Eigen::Index i = 0; i < m; ++i) v += es.eigenvectors()(i, 0) * basis[i];
        v.normalize();
        best.value = es.eigenvalues()[0];
        best.second = m > 1 ? es.eigenvalues()[1] : best.second;
        best.vector = v;
        break;
      }
      beta.push_back(b_next);
      basis.push_back(w / b_next);
    }
    const double residual = (h * best.vector - best.value * best.vector).norm();
    if (residual <= 1e-2 * kResidualTol * hnorm) return best;
    start = best.vector;
  }
  const double residual = (h * best.vector - best.value * best.vector).norm();
  if (residual <= kResidualTol * hnorm) return best;
  throw Error(ErrorCode::NoConvergence,
              "Lanczos residual " + std::to_string(residual) +
                  " above tolerance after restarts");
}

Eigenpair lowest(const SparseMatrix& h, double hnorm) {
  if (h.rows() <= kDenseLimit) return lowest_dense(h);
  return lowest_lanczos(h, hnorm);
}

bool conserves_parity(const SparseMatrix& h) {
  for (int k = 0; k < h.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(h, k); it; ++it)
      if (it.value() != 0.0 && parity_of(it.row()) != parity_of(it.col()))
        return false;
  return true;
}

SparseMatrix parity_block(const SparseMatrix& h, int parity,
                          std::vector<Eigen::Index>& members) {
  const Eigen::Index dim = h.rows();
  std::vector<Eigen::Index> position(dim, -1);
  members.clear();
  for (Eigen::Index i = 0; i < dim; ++i)
    if (parity_of(i) == parity) {
      position[i] = static_cast<Eigen::Index>(members.size());
      members.push_back(i);
    }
  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < h.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(h, k); it; ++it)
      if (position[it.row()] >= 0 && position[it.col()] >= 0)
        triplets.emplace_back(position[it.row()], position[it.col()], it.value());
  const auto m = static_cast<Eigen::Index>(members.size());
  SparseMatrix block(m, m);
  block.setFromTriplets(triplets.begin(), triplets.end());
  return block;
}

void fix_sign(VectorXd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
}

void check_sites(const DenseGroundState& state, int i, int j) {
  if (i == j)
    throw Error(ErrorCode::SameSite, "sites " + std::to_string(i) + " coincide");
  if (i < 1 || j < 1 || i > state.sites || j > state.sites)
    throw Error(ErrorCode::InvalidSize, "site index outside [1, N]");
}

}  // namespace

SparseMatrix build_hamiltonian(const ModelParams& params, BondConvention convention) {
  const long n = params.sites();
  if (n > kMaxSites)
    throw Error(ErrorCode::SizeTooLarge,
                "N = " + std::to_string(n) + " exceeds the oracle limit of 13");
  double jx = params.coupling_x();
  double jy = params.coupling_y();
  if (convention == BondConvention::AnisotropyOnXX) std::swap(jx, jy);

  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim * (n + 1)));
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    const int down = std::popcount(static_cast<unsigned long>(idx));
    // -sum_i sz_i
    triplets.emplace_back(idx, idx, -static_cast<double>(n - 2 * down));
    for (long s = 0; s < n; ++s) {
      const long t = (s + 1) % n;
      const Eigen::Index mask = (Eigen::Index{1} << s) | (Eigen::Index{1} << t);
      const int bs = (idx >> s) & 1;
      const int bt = (idx >> t) & 1;
      // sx sx flips both spins with amplitude 1; sy sy with -(-1)^(bs+bt).
      const double yy = ((bs + bt) % 2 == 0) ? -1.0 : 1.0;
      const double element = -jx - jy * yy;
      if (element != 0.0) triplets.emplace_back(idx ^ mask, idx, element);
    }
  }
  SparseMatrix h(dim, dim);
  h.setFromTriplets(triplets.begin(), triplets.end());
  return h;
}

DenseGroundState ground_state(const SparseMatrix& hamiltonian) {
  const double hnorm = norm_estimate(hamiltonian);
  DenseGroundState out;
  out.sites = sites_from_dim(hamiltonian.rows());

  if (hamiltonian.rows() >= 2 && conserves_parity(hamiltonian)) {
    std::vector<Eigen::Index> even_members, odd_members;
    const SparseMatrix even = parity_block(hamiltonian, 0, even_members);
    const SparseMatrix odd = parity_block(hamiltonian, 1, odd_members);
    const Eigenpair e = lowest(even, hnorm);
    const Eigenpair o = lowest(odd, hnorm);
    // Ties go to the even sector, matching the free-fermion selection.
    const bool take_even = e.value <= o.value;
    const Eigenpair& pick = take_even ? e : o;
    const auto& members = take_even ? even_members : odd_members;
    out.energy = pick.value;
    out.amplitudes = VectorXd::Zero(hamiltonian.rows());
    for (std::size_t k = 0; k < members.size(); ++k)
      out.amplitudes[members[k]] = pick.vector[static_cast<Eigen::Index>(k)];
    const double other = take_even ? o.value : e.value;
    out.gap_too_small = std::min(other, pick.second) - pick.value < kGapWarn;
  } else {
    const Eigenpair p = lowest(hamiltonian, hnorm);
    out.energy = p.value;
    out.amplitudes = p.vector;
    out.gap_too_small = p.second - p.value < kGapWarn;
  }
  out.amplitudes.normalize();
  fix_sign(out.amplitudes);
  return out;
}

DenseGroundState solve(const ModelParams& params, BondConvention convention) {
  return ground_state(build_hamiltonian(params, convention));
}

TwoSiteState reduced_density_matrix(const DenseGroundState& state, int i, int j) {
  check_sites(state, i, j);
  const int si = i - 1;
  const int sj = j - 1;
  const Eigen::Index pair_mask = (Eigen::Index{1} << si) | (Eigen::Index{1} << sj);
  const VectorXd& psi = state.amplitudes;
  TwoSiteState out;
  for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
    if (idx & pair_mask) continue;  // enumerate environment configurations
    double amp[4];
    for (int a = 0; a < 4; ++a) {
      Eigen::Index full = idx;
      if (a & 2) full |= Eigen::Index{1} << si;
      if (a & 1) full |= Eigen::Index{1} << sj;
      amp[a] = psi[full];
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out.rho(a, b) += amp[a] * amp[b];
  }
  return out;
}

double correlator(const DenseGroundState& state, Axis axis, int i, int j) {
  check_sites(state, i, j);
  const int si = i - 1;
  const int sj = j - 1;
  const Eigen::Index mask = (Eigen::Index{1} << si) | (Eigen::Index{1} << sj);
  const VectorXd& psi = state.amplitudes;
  double acc = 0.0;
  for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
    const int bi = (idx >> si) & 1;
    const int bj = (idx >> sj) & 1;
    const double same = (bi == bj) ? 1.0 : -1.0;
    switch (axis) {
      case Axis::Z: acc += same * psi[idx] * psi[idx]; break;
      case Axis::X: acc += psi[idx ^ mask] * psi[idx]; break;
      case Axis::Y: acc += -same * psi[idx ^ mask] * psi[idx]; break;
    }
  }
  return acc;
}

double magnetization(const DenseGroundState& state, int i) {
  if (i < 1 || i > state.sites)
    throw Error(ErrorCode::InvalidSize, "site index outside [1, N]");
  const VectorXd& psi = state.amplitudes;
  double acc = 0.0;
  for (Eigen::Index idx = 0; idx < psi.size(); ++idx)
    acc += (((idx >> (i - 1)) & 1) ? -1.0 : 1.0) * psi[idx] * psi[idx];
  return acc;
}

}  // namespace xyent::ed
