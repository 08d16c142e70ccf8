#include "lel/classical.hpp"

#include <cmath>
#include <stdexcept>

namespace lel::classical {

namespace {

constexpr double kMassTolerance = 1e-8;

// Deposits `value` at fractional cell position x split linearly between
// floor(x) and floor(x) + 1.
struct Split {
  long lower;
  double upper_weight;
};

Split split_position(double x) {
  const double fl = std::floor(x);
  return {static_cast<long>(fl), x - fl};
}

long wrap(long i, long n) {
  const long r = i % n;
  return r < 0 ? r + n : r;
}

long clamp(long i, long n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace

void PhaseGrid::validate() const {
  if (nq < 1 || np < 2) {
    throw std::invalid_argument("phase grid needs nq >= 1 and np >= 2");
  }
  if (np % 2 != 0) {
    throw std::invalid_argument("phase grid needs an even np so that p = 0 is a cell edge");
  }
  if (!(dq > 0.0) || !(dp > 0.0) || !std::isfinite(dq) || !std::isfinite(dp)) {
    throw std::invalid_argument("phase grid spacings must be positive and finite");
  }
}

int PhaseGrid::row_of(double p_value) const {
  const double x = p_value / dp + 0.5 * np - 0.5;
  const long j = std::lround(x);
  if (j < 0 || j >= np) {
    throw std::out_of_range("momentum outside the phase grid");
  }
  return static_cast<int>(j);
}

PhaseSpaceDensity::PhaseSpaceDensity(PhaseGrid grid, Eigen::MatrixXd values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.rows() != grid_.np || values_.cols() != grid_.nq) {
    throw DimensionMismatch("density values must be np x nq");
  }
  if (!values_.allFinite() || values_.minCoeff() < 0.0) {
    throw InvariantError("phase-space density must be finite and nonnegative");
  }
  if (!(std::abs(mass() - 1.0) <= kMassTolerance)) {
    throw InvariantError("phase-space density must have unit mass (got " +
                         std::to_string(mass()) + ")");
  }
}

PhaseSpaceDensity PhaseSpaceDensity::normalized(PhaseGrid grid, Eigen::MatrixXd values) {
  grid.validate();
  const double m = values.sum() * grid.dq * grid.dp;
  if (!(m > 0.0)) {
    throw InvariantError("cannot normalize a density with zero mass");
  }
  values /= m;
  return PhaseSpaceDensity(grid, std::move(values));
}

double PhaseSpaceDensity::mass() const { return values_.sum() * grid_.dq * grid_.dp; }

int BetaMarginal::support(double tol) const {
  return static_cast<int>((density.array() > tol).count());
}

PhaseSpaceDensity classical_free_flow(const PhaseSpaceDensity& rho, double t) {
  const PhaseGrid& g = rho.grid();
  if (t == 0.0) {
    return rho;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.np, g.nq);
  for (int j = 0; j < g.np; ++j) {
    const double shift = 2.0 * g.p(j) * t / g.dq;
    for (int i = 0; i < g.nq; ++i) {
      const double v = rho.values()(j, i);
      if (v == 0.0) {
        continue;
      }
      const Split s = split_position(i + shift);
      out(j, wrap(s.lower, g.nq)) += (1.0 - s.upper_weight) * v;
      out(j, wrap(s.lower + 1, g.nq)) += s.upper_weight * v;
    }
  }
  return PhaseSpaceDensity(g, std::move(out));
}

std::pair<double, double> xi_beta_coordinates(double q, double p, double p_min) {
  if (!(std::abs(p) >= p_min)) {
    throw std::domain_error("xi = q / (2p) is undefined inside the band |p| < p_min");
  }
  return {q / (2.0 * p), p};
}

BetaMarginal classical_reduce(const PhaseSpaceDensity& rho) {
  const PhaseGrid& g = rho.grid();
  BetaMarginal m;
  m.dp = g.dp;
  m.p.reserve(static_cast<std::size_t>(g.np));
  for (int j = 0; j < g.np; ++j) {
    m.p.push_back(g.p(j));
  }
  m.density = rho.values().rowwise().sum() * g.dq;
  m.density /= m.density.sum() * g.dp;
  return m;
}

double classical_effective_entropy(const BetaMarginal& marginal) {
  double s = 0.0;
  for (Index j = 0; j < marginal.density.size(); ++j) {
    const double v = marginal.density(j);
    if (v > 0.0) {
      s -= v * std::log(v) * marginal.dp;
    }
  }
  return s;
}

PhaseSpaceDensity apply_kick(const PhaseSpaceDensity& rho,
                             const std::function<double(double)>& potential_derivative,
                             double strength) {
  const PhaseGrid& g = rho.grid();
  if (strength == 0.0) {
    return rho;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.np, g.nq);
  for (int i = 0; i < g.nq; ++i) {
    const double shift = -strength * potential_derivative(g.q(i)) / g.dp;
    for (int j = 0; j < g.np; ++j) {
      const double v = rho.values()(j, i);
      if (v == 0.0) {
        continue;
      }
      const Split s = split_position(j + shift);
      out(clamp(s.lower, g.np), i) += (1.0 - s.upper_weight) * v;
      out(clamp(s.lower + 1, g.np), i) += s.upper_weight * v;
    }
  }
  return PhaseSpaceDensity(g, std::move(out));
}

std::function<double(double)> kick_shape_derivative(const std::string& shape) {
  if (shape == "cos") {
    return [](double q) { return -std::sin(q); };
  }
  if (shape == "linear") {
    return [](double) { return 1.0; };
  }
  throw std::invalid_argument("unknown kick shape '" + shape + "'");
}

PhaseSpaceDensity single_p_row(const PhaseGrid& grid, double p0) {
  grid.validate();
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(grid.np, grid.nq);
  values.row(grid.row_of(p0)).setOnes();
  return PhaseSpaceDensity::normalized(grid, std::move(values));
}

}  // namespace lel::classical
