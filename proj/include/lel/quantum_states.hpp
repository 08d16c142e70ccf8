#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lel/basis.hpp"
#include "lel/common.hpp"

namespace lel {

/// Fixed validation tolerances for density matrices and pure states.
struct StateTolerance {
  static constexpr double hermiticity = 1e-12;
  static constexpr double trace = 1e-10;
  static constexpr double min_eigenvalue = -1e-10;
  static constexpr double norm = 1e-12;
  static constexpr double entropy_clip = 1e-12;
};

template <typename Real>
class DensityMatrix {
 public:
  using Matrix = CMatrix<Real>;

  /// Validates Hermiticity, unit trace and positivity; throws InvariantError.
  explicit DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
      throw DimensionMismatch("density matrix must be square");
    }
    if (entries_.rows() == 0) {
      throw InvariantError("density matrix must be non-empty");
    }
    const Real herm = hermiticity_defect(entries_);
    if (!(herm <= Real(StateTolerance::hermiticity))) {
      throw InvariantError("density matrix not Hermitian (defect " + std::to_string(double(herm)) +
                           ")");
    }
    const Real tr_err = std::abs(entries_.trace() - Complex<Real>(1));
    if (!(tr_err <= Real(StateTolerance::trace))) {
      throw InvariantError("density matrix trace differs from 1 by " +
                           std::to_string(double(tr_err)));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw InvariantError("eigendecomposition failed during validation");
    }
    if (!(es.eigenvalues().minCoeff() >= Real(StateTolerance::min_eigenvalue))) {
      throw InvariantError("density matrix has negative eigenvalue " +
                           std::to_string(double(es.eigenvalues().minCoeff())));
    }
  }

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  Complex<Real> operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

template <typename Real>
class PureState {
 public:
  using Vector = CVector<Real>;

  explicit PureState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
    const Real err = std::abs(amplitudes_.squaredNorm() - Real(1));
    if (amplitudes_.size() == 0 || !(err <= Real(StateTolerance::norm))) {
      throw InvariantError("pure state amplitudes must have unit norm");
    }
  }

  Index dim() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }

 private:
  Vector amplitudes_;
};

/// Rank-one projector |psi><psi|.
template <typename Real>
DensityMatrix<Real> pure_to_density(const PureState<Real>& psi) {
  const auto& a = psi.amplitudes();
  CMatrix<Real> rho = a * a.adjoint();
  return DensityMatrix<Real>(std::move(rho));
}

/// -sum lambda ln lambda over the eigenvalues of a Hermitian matrix, dropping
/// eigenvalues at or below the clip threshold.
template <typename Derived>
auto von_neumann_entropy(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("entropy needs a square matrix");
  }
  if (m.rows() == 0) {
    return Real(0);
  }
  const CMatrix<Real> a = m.template cast<Complex<Real>>();
  if (!(hermiticity_defect(a) <= Real(1e-8) * std::max(Real(1), a.cwiseAbs().maxCoeff()))) {
    throw InvariantError("entropy of a non-Hermitian matrix is undefined");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw InvariantError("eigendecomposition failed");
  }
  Real s(0);
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Real lam = es.eigenvalues()(i);
    if (lam > Real(StateTolerance::entropy_clip)) {
      s -= lam * std::log(lam);
    }
  }
  // An eigenvalue rounded just above 1 would otherwise give -1e-16.
  return std::max(s, Real(0));
}

template <typename Real>
Real global_entropy(const DensityMatrix<Real>& rho) {
  return von_neumann_entropy(rho.matrix());
}

/// Tr rho^2.
template <typename Real>
Real global_purity(const DensityMatrix<Real>& rho) {
  // Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

/// rho = sum_ab mu_ab |phi_a><phi_b| with each phi_a a unit vector living on
/// one energy shell. Every shell block of the result has rank at most one.
///
/// `shells[a]` names the shell that `shell_states[a]` is supported on.
template <typename Real>
DensityMatrix<Real> appendix_a_state(const MomentumBasis& basis,
                                     std::span<const std::size_t> shells,
                                     std::span<const CVector<Real>> shell_states,
                                     const CMatrix<Real>& mu) {
  const auto k = static_cast<Index>(shells.size());
  if (k == 0 || shell_states.size() != shells.size()) {
    throw DimensionMismatch("need one state per listed shell");
  }
  if (mu.rows() != k || mu.cols() != k) {
    throw DimensionMismatch("mu must be square with one row per shell");
  }
  const auto dim = static_cast<Index>(basis.size());
  CMatrix<Real> phi(dim, k);
  std::vector<bool> used(basis.shell_count(), false);
  for (Index a = 0; a < k; ++a) {
    const std::size_t shell = shells[a];
    if (shell >= basis.shell_count()) {
      throw std::out_of_range("shell id out of range");
    }
    if (used[shell]) {
      throw InvariantError("shell listed twice");
    }
    used[shell] = true;
    const auto& v = shell_states[a];
    if (v.size() != dim) {
      throw DimensionMismatch("shell state has wrong dimension");
    }
    for (Index i = 0; i < dim; ++i) {
      if (basis.shell_of(static_cast<std::size_t>(i)) != shell &&
          std::abs(v(i)) > Real(StateTolerance::norm)) {
        throw InvariantError("shell state has support outside shell " + std::to_string(shell));
      }
    }
    if (!(std::abs(v.squaredNorm() - Real(1)) <= Real(StateTolerance::norm))) {
      throw InvariantError("shell state must have unit norm");
    }
    phi.col(a) = v;
  }
  if (!(hermiticity_defect(mu) <= Real(StateTolerance::hermiticity))) {
    throw InvariantError("mu must be Hermitian");
  }
  if (!(std::abs(mu.trace() - Complex<Real>(1)) <= Real(StateTolerance::trace))) {
    throw InvariantError("mu must have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(mu, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() >= Real(StateTolerance::min_eigenvalue))) {
    throw InvariantError("mu must be positive semidefinite");
  }
  CMatrix<Real> rho = phi * mu * phi.adjoint();
  rho = (rho + rho.adjoint()) / Real(2);
  return DensityMatrix<Real>(std::move(rho));
}

// Seeded generators. std::mt19937_64 keeps runs reproducible for a given seed.

template <typename Real, typename Rng>
CVector<Real> random_complex_gaussian(Index n, Rng& rng) {
  std::normal_distribution<Real> normal(Real(0), Real(1));
  CVector<Real> v(n);
  for (Index i = 0; i < n; ++i) {
    const Real re = normal(rng);
    const Real im = normal(rng);
    v(i) = Complex<Real>(re, im);
  }
  return v;
}

template <typename Real, typename Rng>
PureState<Real> random_pure_state(Index dim, Rng& rng) {
  CVector<Real> v = random_complex_gaussian<Real>(dim, rng);
  v /= v.norm();
  return PureState<Real>(std::move(v));
}

/// Ginibre-ensemble mixed state of the given rank.
template <typename Real, typename Rng>
DensityMatrix<Real> random_density_matrix(Index dim, Index rank, Rng& rng) {
  CMatrix<Real> g(dim, rank);
  for (Index c = 0; c < rank; ++c) {
    g.col(c) = random_complex_gaussian<Real>(dim, rng);
  }
  CMatrix<Real> rho = g * g.adjoint();
  rho = (rho + rho.adjoint()) / Real(2);
  rho /= rho.trace().real();
  return DensityMatrix<Real>(std::move(rho));
}

template <typename Real, typename Rng>
CMatrix<Real> random_hermitian(Index dim, Rng& rng) {
  CMatrix<Real> g(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    g.col(c) = random_complex_gaussian<Real>(dim, rng);
  }
  return (g + g.adjoint()) / Real(2);
}

/// Random unit vector supported on a single shell.
template <typename Real, typename Rng>
CVector<Real> random_shell_vector(const MomentumBasis& basis, std::size_t shell, Rng& rng) {
  const auto& members = basis.shells().members.at(shell);
  const CVector<Real> g = random_complex_gaussian<Real>(static_cast<Index>(members.size()), rng);
  CVector<Real> v = CVector<Real>::Zero(static_cast<Index>(basis.size()));
  for (std::size_t m = 0; m < members.size(); ++m) {
    v(static_cast<Index>(members[m])) = g(static_cast<Index>(m));
  }
  return v / v.norm();
}

}  // namespace lel
