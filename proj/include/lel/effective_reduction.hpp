#pragma once

// Bohr-frequency (alpha) decomposition of operators on a momentum basis and
// the effective state obtained by keeping the alpha = 0 sector, i.e. the
// block-diagonal part over energy shells.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lel/basis.hpp"
#include "lel/common.hpp"
#include "lel/quantum_states.hpp"

namespace lel {

/// Shell weights below this are treated as empty.
inline constexpr double kShellOccupancyThreshold = 1e-12;
inline constexpr double kDefaultRankTolerance = 1e-8;

/// Distinct Bohr frequencies alpha = E_col - E_row of a basis and the label
/// of every (row shell, column shell) pair.
struct BohrFrequencies {
  std::vector<double> alphas;                  // ascending
  std::vector<std::vector<std::size_t>> label;  // [row shell][col shell] -> index into alphas

  /// Label of the Liouville basis element |k_row><k_col|.
  std::size_t label_of(const MomentumBasis& basis, std::size_t row, std::size_t col) const {
    return label[basis.shell_of(row)][basis.shell_of(col)];
  }
};

inline BohrFrequencies bohr_frequencies(const MomentumBasis& basis) {
  const auto& e = basis.shells().shell_energies;
  const std::size_t ns = e.size();
  std::vector<double> diffs;
  diffs.reserve(ns * ns);
  for (std::size_t a = 0; a < ns; ++a) {
    for (std::size_t b = 0; b < ns; ++b) {
      diffs.push_back(e[b] - e[a]);
    }
  }
  std::sort(diffs.begin(), diffs.end());
  const double tol = 2.0 * basis.shell_tolerance();
  BohrFrequencies out;
  for (double d : diffs) {
    if (out.alphas.empty() || d - out.alphas.back() > tol) {
      out.alphas.push_back(d);
    }
  }
  out.label.assign(ns, std::vector<std::size_t>(ns, 0));
  for (std::size_t a = 0; a < ns; ++a) {
    for (std::size_t b = 0; b < ns; ++b) {
      const double d = e[b] - e[a];
      const auto it = std::lower_bound(out.alphas.begin(), out.alphas.end(), d - tol);
      out.label[a][b] = static_cast<std::size_t>(it - out.alphas.begin());
    }
  }
  return out;
}

/// Partition of a matrix by Bohr frequency. Component c is supported exactly on
/// the index pairs (i, j) with E_j - E_i = alphas[c]; supports are disjoint.
template <typename Real>
struct AlphaDecomposition {
  std::vector<double> alphas;
  std::vector<CMatrix<Real>> components;

  /// Component at a given frequency, or nullptr if that frequency is absent.
  const CMatrix<Real>* find(double alpha, double tol = 1e-9) const {
    for (std::size_t c = 0; c < alphas.size(); ++c) {
      if (std::abs(alphas[c] - alpha) <= tol) {
        return &components[c];
      }
    }
    return nullptr;
  }

  CMatrix<Real> reconstruct() const {
    CMatrix<Real> sum = CMatrix<Real>::Zero(components.front().rows(), components.front().cols());
    for (const auto& c : components) {
      sum += c;
    }
    return sum;
  }
};

/// Splits `m` into its Bohr-frequency components. Only frequencies whose
/// component has at least one structurally allowed entry are listed, so the
/// result always carries every alpha of the basis.
template <typename Derived>
auto alpha_decompose(const Eigen::MatrixBase<Derived>& m, const MomentumBasis& basis) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const auto dim = static_cast<Index>(basis.size());
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionMismatch("matrix dimension does not match basis");
  }
  const BohrFrequencies freq = bohr_frequencies(basis);
  AlphaDecomposition<Real> out;
  out.alphas = freq.alphas;
  out.components.assign(freq.alphas.size(), CMatrix<Real>::Zero(dim, dim));
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) {
      const std::size_t c =
          freq.label_of(basis, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      out.components[c](i, j) = m(i, j);
    }
  }
  return out;
}

/// Free evolution written in the frequency picture: sum_alpha e^{i alpha t} component.
template <typename Real>
CMatrix<Real> free_phase_law(const AlphaDecomposition<Real>& decomp, Real t) {
  CMatrix<Real> out =
      CMatrix<Real>::Zero(decomp.components.front().rows(), decomp.components.front().cols());
  for (std::size_t c = 0; c < decomp.alphas.size(); ++c) {
    const Real phase = Real(decomp.alphas[c]) * t;
    out += Complex<Real>(std::cos(phase), std::sin(phase)) * decomp.components[c];
  }
  return out;
}

template <typename Real>
struct ShellBlock {
  double energy = 0.0;
  Real weight = 0;           // lambda_E = trace of the raw block
  CMatrix<Real> block;       // P_E rho P_E restricted to the shell
  CMatrix<Real> normalized;  // block / lambda_E; empty when unoccupied
  bool occupied = false;
};

/// Effective state resolved by energy shell.
template <typename Real>
struct ShellDecomposition {
  std::vector<ShellBlock<Real>> shells;

  Real total_weight() const {
    Real s(0);
    for (const auto& b : shells) {
      s += b.weight;
    }
    return s;
  }
};

inline std::vector<Index> to_eigen_indices(const std::vector<std::size_t>& members) {
  return {members.begin(), members.end()};
}

/// Keeps the alpha = 0 component of `m` and splits it into shell blocks.
/// Accepts any Hermitian matrix, including non-positive approximations.
template <typename Derived>
auto reduce_matrix(const Eigen::MatrixBase<Derived>& m, const MomentumBasis& basis) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const auto dim = static_cast<Index>(basis.size());
  if (m.rows() != dim || m.cols() != dim) {
    throw DimensionMismatch("matrix dimension does not match basis");
  }
  const CMatrix<Real> full = m.template cast<Complex<Real>>();
  ShellDecomposition<Real> out;
  out.shells.reserve(basis.shell_count());
  for (std::size_t s = 0; s < basis.shell_count(); ++s) {
    const auto idx = to_eigen_indices(basis.shells().members[s]);
    ShellBlock<Real> b;
    b.energy = basis.shells().shell_energies[s];
    b.block = full(idx, idx);
    b.weight = b.block.trace().real();
    b.occupied = b.weight > Real(kShellOccupancyThreshold);
    if (b.occupied) {
      b.normalized = b.block / b.weight;
    }
    out.shells.push_back(std::move(b));
  }
  return out;
}

template <typename Real>
ShellDecomposition<Real> reduce(const DensityMatrix<Real>& rho, const MomentumBasis& basis) {
  return reduce_matrix(rho.matrix(), basis);
}

/// Block-diagonal matrix sum_E P_E rho P_E rebuilt from the raw shell blocks.
template <typename Real>
CMatrix<Real> assemble(const ShellDecomposition<Real>& dec, const MomentumBasis& basis) {
  if (dec.shells.size() != basis.shell_count()) {
    throw DimensionMismatch("decomposition does not match basis shells");
  }
  const auto dim = static_cast<Index>(basis.size());
  CMatrix<Real> out = CMatrix<Real>::Zero(dim, dim);
  for (std::size_t s = 0; s < dec.shells.size(); ++s) {
    const auto idx = to_eigen_indices(basis.shells().members[s]);
    out(idx, idx) = dec.shells[s].block;
  }
  return out;
}

/// Entropy -Tr rho_E ln rho_E of each normalized shell block; 0 for empty shells.
template <typename Real>
std::vector<Real> shell_entropies(const ShellDecomposition<Real>& dec) {
  std::vector<Real> out;
  out.reserve(dec.shells.size());
  for (const auto& b : dec.shells) {
    out.push_back(b.occupied ? von_neumann_entropy(b.normalized) : Real(0));
  }
  return out;
}

/// Unweighted sum of shell entropies over occupied shells.
template <typename Real>
Real effective_entropy(const ShellDecomposition<Real>& dec) {
  Real s(0);
  for (Real se : shell_entropies(dec)) {
    s += se;
  }
  return s;
}

/// sum_E lambda_E S_E. Secondary statistic; not the effective entropy.
template <typename Real>
Real weighted_effective_entropy(const ShellDecomposition<Real>& dec) {
  const auto se = shell_entropies(dec);
  Real s(0);
  for (std::size_t i = 0; i < se.size(); ++i) {
    s += dec.shells[i].weight * se[i];
  }
  return s;
}

/// Second-largest eigenvalue of every occupied normalized block is below tol_rank.
template <typename Real>
bool is_effectively_pure(const ShellDecomposition<Real>& dec,
                         Real tol_rank = Real(kDefaultRankTolerance)) {
  for (const auto& b : dec.shells) {
    if (!b.occupied || b.normalized.rows() < 2) {
      continue;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(b.normalized, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw InvariantError("eigendecomposition of shell block failed");
    }
    const auto& ev = es.eigenvalues();  // ascending
    if (!(ev(ev.size() - 2) < tol_rank)) {
      return false;
    }
  }
  return true;
}

/// Throws InvariantError unless the weights sum to one and every occupied
/// normalized block is a valid density matrix.
template <typename Real>
void check_shell_decomposition(const ShellDecomposition<Real>& dec) {
  if (!(std::abs(dec.total_weight() - Real(1)) <= Real(1e-10))) {
    throw InvariantError("shell weights do not sum to one");
  }
  for (const auto& b : dec.shells) {
    if (b.occupied) {
      DensityMatrix<Real> check(b.normalized);
      (void)check;
    }
  }
}

/// Operator commuting with H0, stored as one block per shell.
template <typename Real>
struct ShellOperator {
  std::vector<CMatrix<Real>> blocks;
};

/// Extracts the shell blocks of a full matrix; throws InvariantError when an
/// entry connecting two different shells exceeds tol.
template <typename Derived>
auto shell_blocks_of(const Eigen::MatrixBase<Derived>& a, const MomentumBasis& basis,
                     double tol = 1e-12) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  const auto dim = static_cast<Index>(basis.size());
  if (a.rows() != dim || a.cols() != dim) {
    throw DimensionMismatch("operator dimension does not match basis");
  }
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) {
      if (basis.shell_of(static_cast<std::size_t>(i)) !=
              basis.shell_of(static_cast<std::size_t>(j)) &&
          std::abs(a(i, j)) > tol) {
        throw InvariantError("observable is not block-diagonal over energy shells");
      }
    }
  }
  const CMatrix<Real> full = a.template cast<Complex<Real>>();
  ShellOperator<Real> out;
  for (const auto& members : basis.shells().members) {
    const auto idx = to_eigen_indices(members);
    out.blocks.push_back(full(idx, idx));
  }
  return out;
}

/// <A> = sum_E lambda_E Tr(A_E rho_E), evaluated on the effective state only.
template <typename Real>
Real expectation_xi_independent(const ShellOperator<Real>& a, const ShellDecomposition<Real>& dec) {
  if (a.blocks.size() != dec.shells.size()) {
    throw DimensionMismatch("observable and decomposition have different shell counts");
  }
  Complex<Real> sum(0);
  for (std::size_t s = 0; s < dec.shells.size(); ++s) {
    const auto& blk = dec.shells[s].block;
    if (a.blocks[s].rows() != blk.rows() || a.blocks[s].cols() != blk.cols()) {
      throw DimensionMismatch("observable block size does not match shell degeneracy");
    }
    // Tr(A_E block_E) = lambda_E Tr(A_E rho_hat_E).
    sum += (a.blocks[s].transpose().cwiseProduct(blk)).sum();
  }
  return sum.real();
}

}  // namespace lel
