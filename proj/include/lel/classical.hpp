#pragma once

// Koopman picture of a free particle with H = p^2 on a periodic q domain.
// Densities live on cell centres q_i = i dq (i < nq) and
// p_j = (j - np/2 + 1/2) dp, so no cell centre falls inside |p| < dp/2 where
// the chart xi = q / (2p) is singular.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lel/common.hpp"

namespace lel::classical {

struct PhaseGrid {
  int nq = 0;
  int np = 0;
  double dq = 0.0;
  double dp = 0.0;

  double q(int i) const { return i * dq; }
  double p(int j) const { return (j - 0.5 * np + 0.5) * dp; }
  double q_period() const { return nq * dq; }
  double p_min() const { return 0.5 * dp; }
  /// Row whose centre is closest to p; throws if p lies outside the grid.
  int row_of(double p) const;
  void validate() const;
};

/// Nonnegative density with unit mass sum(values) dq dp.
/// values(j, i) holds the density at (q_i, p_j).
class PhaseSpaceDensity {
 public:
  /// Validates shape, nonnegativity and unit mass (1e-8); throws InvariantError.
  PhaseSpaceDensity(PhaseGrid grid, Eigen::MatrixXd values);

  /// Rescales nonnegative values to unit mass before validation.
  static PhaseSpaceDensity normalized(PhaseGrid grid, Eigen::MatrixXd values);

  const PhaseGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double mass() const;

 private:
  PhaseGrid grid_;
  Eigen::MatrixXd values_;
};

/// Marginal density over beta = p, with unit mass sum(m) dp.
struct BetaMarginal {
  std::vector<double> p;
  Eigen::VectorXd density;
  double dp = 0.0;

  double mass() const { return density.sum() * dp; }
  /// Number of cells with density above tol.
  int support(double tol = 1e-12) const;
};

/// Free flow q -> q + 2 p t by semi-Lagrangian backtrace with linear
/// interpolation. Each p row is shifted rigidly, so mass and the p-marginal
/// are preserved.
PhaseSpaceDensity classical_free_flow(const PhaseSpaceDensity& rho, double t);

/// (xi, beta) = (q / (2p), p); throws std::domain_error when |p| < p_min.
std::pair<double, double> xi_beta_coordinates(double q, double p, double p_min);

/// Integral over xi at fixed beta, i.e. the normalized p-marginal.
BetaMarginal classical_reduce(const PhaseSpaceDensity& rho);

/// Differential entropy -sum m ln m dp of a unit-mass marginal.
double classical_effective_entropy(const BetaMarginal& marginal);

/// Impulse p -> p - strength V'(q) applied column by column. Mass that would
/// leave the p window is clamped into the edge cells.
PhaseSpaceDensity apply_kick(const PhaseSpaceDensity& rho,
                             const std::function<double(double)>& potential_derivative,
                             double strength);

/// V'(q) for the named shapes: "cos" (V = cos q) and "linear" (V = q).
std::function<double(double)> kick_shape_derivative(const std::string& shape);

/// Unit-mass density concentrated on the single p row nearest p0, uniform in q.
PhaseSpaceDensity single_p_row(const PhaseGrid& grid, double p0);

}  // namespace lel::classical
