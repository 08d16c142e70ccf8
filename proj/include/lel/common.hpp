#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lel {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented invariant (trace, Hermiticity, positivity, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A requested size exceeds a configured cap.
class DimensionCapError : public Error {
 public:
  using Error::Error;
};

/// Shapes of two operands do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Largest elementwise |m - m^dagger|.
template <typename Derived>
auto hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace lel
