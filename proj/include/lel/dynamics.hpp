#pragma once

// Hamiltonians on a momentum basis, exact unitary evolution of density
// matrices, and the Liouvillian as an explicit superoperator.
//
// Sign convention: the Liouvillian acts as L X = H X - X H, so that
// exp(-i L t) rho = exp(-i H t) rho exp(i H t). On |k1><k2| the free part has
// eigenvalue E1 - E2; Bohr frequencies are labelled alpha = E2 - E1, which is
// why free evolution multiplies an alpha component by exp(+i alpha t).

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "lel/basis.hpp"
#include "lel/common.hpp"
#include "lel/effective_reduction.hpp"
#include "lel/quantum_states.hpp"

namespace lel {

inline constexpr std::size_t kDefaultSuperoperatorMaxDim = 64;

/// Fourier transform of the screened Coulomb potential A exp(-mu r) / (mu r):
/// 4 pi A / (mu (|k|^2 + mu^2)).
template <typename Real>
Real yukawa_fourier(Real k_squared, Real coupling, Real screening) {
  if (!(screening > Real(0))) {
    throw std::invalid_argument("Yukawa screening mu must be positive");
  }
  return Real(4) * std::numbers::pi_v<Real> * coupling /
         (screening * (k_squared + screening * screening));
}

template <typename Real>
Real yukawa_fourier(const std::array<Real, 3>& k, Real coupling, Real screening) {
  return yukawa_fourier(k[0] * k[0] + k[1] * k[1] + k[2] * k[2], coupling, screening);
}

/// H = diag(h0) + v.
template <typename Real>
struct Hamiltonian {
  RVector<Real> h0;
  CMatrix<Real> v;
  Real coupling = 0;
  Real screening = 1;

  Index dim() const { return h0.size(); }
  CMatrix<Real> full() const {
    CMatrix<Real> h = v;
    h.diagonal() += h0.template cast<Complex<Real>>();
    return h;
  }
  CMatrix<Real> free() const { return h0.template cast<Complex<Real>>().asDiagonal(); }
};

/// Squared lattice distance |k_i - k_j|^2 in momentum units.
inline double momentum_transfer_squared(const MomentumBasis& basis, std::size_t i, std::size_t j) {
  const auto& a = basis.points()[i];
  const auto& b = basis.points()[j];
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double d = (a[c] - b[c]) * basis.delta_k();
    s += d * d;
  }
  return s;
}

/// Kinetic term E_k plus Yukawa interaction V_{kk'} = V~(k - k'); box
/// normalization constants are absorbed into the coupling.
template <typename Real = double>
Hamiltonian<Real> build_hamiltonian(const MomentumBasis& basis, Real coupling, Real screening) {
  if (!(screening > Real(0))) {
    throw std::invalid_argument("Yukawa screening mu must be positive");
  }
  const auto dim = static_cast<Index>(basis.size());
  Hamiltonian<Real> h;
  h.coupling = coupling;
  h.screening = screening;
  h.h0.resize(dim);
  h.v = CMatrix<Real>::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    h.h0(i) = Real(basis.energies()[static_cast<std::size_t>(i)]);
  }
  if (coupling != Real(0)) {
    for (Index j = 0; j < dim; ++j) {
      for (Index i = 0; i < dim; ++i) {
        const Real q2 = Real(momentum_transfer_squared(basis, static_cast<std::size_t>(i),
                                                       static_cast<std::size_t>(j)));
        h.v(i, j) = yukawa_fourier(q2, coupling, screening);
      }
    }
  }
  return h;
}

/// Spectral form of exp(-i H t), reusable across times. Read-only after
/// construction, so one instance may serve several threads.
template <typename Real>
class Propagator {
 public:
  explicit Propagator(const CMatrix<Real>& h) {
    if (h.rows() != h.cols()) {
      throw DimensionMismatch("Hamiltonian must be square");
    }
    if (!(hermiticity_defect(h) <= Real(1e-12) * std::max(Real(1), h.cwiseAbs().maxCoeff()))) {
      throw InvariantError("Hamiltonian is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h);
    if (es.info() != Eigen::Success) {
      throw InvariantError("Hamiltonian eigendecomposition failed");
    }
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
  }
  explicit Propagator(const Hamiltonian<Real>& h) : Propagator(h.full()) {}

  const RVector<Real>& eigenvalues() const { return eigenvalues_; }
  const CMatrix<Real>& eigenvectors() const { return eigenvectors_; }

  CMatrix<Real> unitary(Real t) const {
    CVector<Real> phases(eigenvalues_.size());
    for (Index i = 0; i < phases.size(); ++i) {
      const Real x = -eigenvalues_(i) * t;
      phases(i) = Complex<Real>(std::cos(x), std::sin(x));
    }
    return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
  }

  /// U(t) m U(t)^dagger for an arbitrary square matrix.
  CMatrix<Real> conjugate(const CMatrix<Real>& m, Real t) const {
    if (m.rows() != eigenvalues_.size() || m.cols() != eigenvalues_.size()) {
      throw DimensionMismatch("operand does not match Hamiltonian dimension");
    }
    // Work in the eigenbasis: (V^dag m V)_ab picks up exp(-i (e_a - e_b) t).
    CMatrix<Real> w = eigenvectors_.adjoint() * m * eigenvectors_;
    for (Index b = 0; b < w.cols(); ++b) {
      for (Index a = 0; a < w.rows(); ++a) {
        const Real x = -(eigenvalues_(a) - eigenvalues_(b)) * t;
        w(a, b) *= Complex<Real>(std::cos(x), std::sin(x));
      }
    }
    return eigenvectors_ * w * eigenvectors_.adjoint();
  }

  DensityMatrix<Real> evolve(const DensityMatrix<Real>& rho, Real t) const {
    CMatrix<Real> out = conjugate(rho.matrix(), t);
    out = (out + out.adjoint()) / Real(2);
    return DensityMatrix<Real>(std::move(out));
  }

 private:
  RVector<Real> eigenvalues_;
  CMatrix<Real> eigenvectors_;
};

/// rho(t) = exp(-i H t) rho exp(i H t).
template <typename Real>
DensityMatrix<Real> evolve(const DensityMatrix<Real>& rho, const CMatrix<Real>& h, Real t) {
  return Propagator<Real>(h).evolve(rho, t);
}

template <typename Real>
DensityMatrix<Real> evolve(const DensityMatrix<Real>& rho, const Hamiltonian<Real>& h, Real t) {
  return Propagator<Real>(h).evolve(rho, t);
}

/// Column-major vectorization: vec(m)[i + j * n] = m(i, j).
template <typename Real>
CVector<Real> vectorize(const CMatrix<Real>& m) {
  return m.reshaped();
}

template <typename Real>
CMatrix<Real> unvectorize(const CVector<Real>& v, Index n) {
  if (v.size() != n * n) {
    throw DimensionMismatch("vector length is not n^2");
  }
  return v.reshaped(n, n);
}

/// Linear map on vectorized matrices.
template <typename Real>
struct Superoperator {
  CMatrix<Real> matrix;  // n^2 x n^2

  Index dim() const {
    return static_cast<Index>(std::llround(std::sqrt(static_cast<double>(matrix.rows()))));
  }
  CMatrix<Real> apply(const CMatrix<Real>& x) const {
    return unvectorize<Real>(matrix * vectorize<Real>(x), x.rows());
  }
};

/// Commutator map X -> H X - X H as an explicit n^2 x n^2 matrix.
template <typename Real>
Superoperator<Real> liouvillian_superoperator(const CMatrix<Real>& h,
                                              std::size_t max_dim = kDefaultSuperoperatorMaxDim) {
  if (h.rows() != h.cols()) {
    throw DimensionMismatch("Hamiltonian must be square");
  }
  const Index n = h.rows();
  if (static_cast<std::size_t>(n) > max_dim) {
    throw DimensionCapError("superoperator of dimension " + std::to_string(n) +
                            " exceeds cap " + std::to_string(max_dim));
  }
  Superoperator<Real> out{CMatrix<Real>::Zero(n * n, n * n)};
  // (H X)_ij = sum_k H_ik X_kj ; (X H)_ij = sum_k X_ik H_kj.
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index row = i + j * n;
      for (Index k = 0; k < n; ++k) {
        out.matrix(row, k + j * n) += h(i, k);
        out.matrix(row, i + k * n) -= h(k, j);
      }
    }
  }
  return out;
}

template <typename Real>
Superoperator<Real> liouvillian_superoperator(const Hamiltonian<Real>& h,
                                              std::size_t max_dim = kDefaultSuperoperatorMaxDim) {
  return liouvillian_superoperator<Real>(h.full(), max_dim);
}

/// exp(-i L t) vec(rho) via a dense Pade matrix exponential.
template <typename Real>
CMatrix<Real> superoperator_propagate(const Superoperator<Real>& l, const CMatrix<Real>& rho,
                                      Real t) {
  const CMatrix<Real> gen = (Complex<Real>(0, -t) * l.matrix).eval();
  const CMatrix<Real> prop = gen.exp();
  return unvectorize<Real>(prop * vectorize<Real>(rho), rho.rows());
}

/// Matrix element <k1,k2| L_I |k3,k4> of the interaction Liouvillian in the
/// Kronecker-delta form delta(k1,k3) V~(k2 - k4) - delta(k2,k4) V~(k1 - k3).
///
/// This carries the opposite overall sign to the commutator X -> V X - X V
/// used by liouvillian_superoperator: the element equals
/// -<k1,k2| [V, .] |k3,k4> for the real symmetric Yukawa V.
inline double interaction_liouvillian_element(const MomentumBasis& basis, std::size_t i1,
                                              std::size_t i2, std::size_t i3, std::size_t i4,
                                              double coupling, double screening) {
  const std::size_t n = basis.size();
  if (i1 >= n || i2 >= n || i3 >= n || i4 >= n) {
    throw std::out_of_range("Liouville index out of range");
  }
  double out = 0.0;
  if (i1 == i3) {
    out += yukawa_fourier(momentum_transfer_squared(basis, i2, i4), coupling, screening);
  }
  if (i2 == i4) {
    out -= yukawa_fourier(momentum_transfer_squared(basis, i1, i3), coupling, screening);
  }
  return out;
}

/// First-order effective state reduce(rho0 - i t [V, rho0]). The free part of
/// the generator drops out of the alpha = 0 sector.
template <typename Real>
ShellDecomposition<Real> first_order_reduced_step(const DensityMatrix<Real>& rho0,
                                                  const Hamiltonian<Real>& h,
                                                  const MomentumBasis& basis, Real t) {
  const CMatrix<Real>& r = rho0.matrix();
  const CMatrix<Real> comm = h.v * r - r * h.v;
  const CMatrix<Real> approx = r - Complex<Real>(0, t) * comm;
  return reduce_matrix(approx, basis);
}

/// Frobenius norm of the part of a superoperator that maps one Bohr-frequency
/// sector into a different one. Rows and columns use the vec ordering
/// i + j * n for |k_i><k_j|.
template <typename Real>
Real alpha_offdiagonal_norm(const CMatrix<Real>& superop, const MomentumBasis& basis) {
  const auto n = static_cast<Index>(basis.size());
  if (superop.rows() != n * n || superop.cols() != n * n) {
    throw DimensionMismatch("superoperator does not match basis");
  }
  const BohrFrequencies freq = bohr_frequencies(basis);
  std::vector<std::size_t> label(static_cast<std::size_t>(n * n));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      label[static_cast<std::size_t>(i + j * n)] =
          freq.label_of(basis, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  Real sum(0);
  for (Index c = 0; c < n * n; ++c) {
    for (Index r = 0; r < n * n; ++r) {
      if (label[static_cast<std::size_t>(r)] != label[static_cast<std::size_t>(c)]) {
        sum += std::norm(superop(r, c));
      }
    }
  }
  return std::sqrt(sum);
}

/// True when the superoperator never carries an alpha component into a
/// different alpha component by more than tol (Frobenius norm).
template <typename Real>
bool alpha_diagonality_test(const CMatrix<Real>& superop, const MomentumBasis& basis, Real tol) {
  return alpha_offdiagonal_norm(superop, basis) <= tol;
}

/// Interaction Liouvillian assembled element by element from
/// interaction_liouvillian_element, in vec ordering.
inline CMatrix<double> interaction_liouvillian(const MomentumBasis& basis, double coupling,
                                               double screening,
                                               std::size_t max_dim = kDefaultSuperoperatorMaxDim) {
  const std::size_t n = basis.size();
  if (n > max_dim) {
    throw DimensionCapError("superoperator of dimension " + std::to_string(n) +
                            " exceeds cap " + std::to_string(max_dim));
  }
  const auto nn = static_cast<Index>(n * n);
  CMatrix<double> out = CMatrix<double>::Zero(nn, nn);
  for (std::size_t i4 = 0; i4 < n; ++i4) {
    for (std::size_t i3 = 0; i3 < n; ++i3) {
      const auto col = static_cast<Index>(i3 + i4 * n);
      for (std::size_t i2 = 0; i2 < n; ++i2) {
        for (std::size_t i1 = 0; i1 < n; ++i1) {
          if (i1 != i3 && i2 != i4) {
            continue;
          }
          out(static_cast<Index>(i1 + i2 * n), col) =
              interaction_liouvillian_element(basis, i1, i2, i3, i4, coupling, screening);
        }
      }
    }
  }
  return out;
}

}  // namespace lel
