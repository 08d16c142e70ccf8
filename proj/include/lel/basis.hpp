#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <json.hpp>

#include "lel/common.hpp"

namespace lel {

/// Integer lattice coordinates n of a momentum k = n * delta_k.
using LatticePoint = std::array<int, 3>;

/// Distinct unperturbed energies and the basis indices carrying each one.
struct ShellTable {
  std::vector<double> shell_energies;              // strictly increasing
  std::vector<std::vector<std::size_t>> members;   // ascending indices per shell
  std::vector<std::size_t> degeneracy;
};

inline constexpr std::size_t kDefaultMaxPoints = 4096;

/// Discrete momentum basis with energies E_k = |k|^2 (units with 2m = 1).
///
/// Immutable after construction. Shells group points whose energies agree
/// within shell_tolerance() = 1e-9 * delta_k^2.
class MomentumBasis {
 public:
  /// Arbitrary point set; shells are derived from the energies.
  MomentumBasis(std::vector<LatticePoint> points, double delta_k);

  std::size_t size() const { return points_.size(); }
  double delta_k() const { return delta_k_; }
  /// Half-width of the cubic lattice, or -1 when the basis was not built by build_basis.
  int half_width() const { return half_width_; }

  const std::vector<LatticePoint>& points() const { return points_; }
  const std::vector<double>& energies() const { return energies_; }
  const ShellTable& shells() const { return shells_; }
  std::size_t shell_count() const { return shells_.shell_energies.size(); }

  double energy(std::size_t index) const { return energies_.at(index); }
  /// Momentum vector k = n * delta_k.
  std::array<double, 3> momentum(std::size_t index) const;
  double shell_tolerance() const { return 1e-9 * delta_k_ * delta_k_; }

  /// Throws std::out_of_range for an invalid index.
  std::size_t shell_of(std::size_t index) const;

  /// Index of a lattice point, or throws std::out_of_range if absent.
  std::size_t index_of(const LatticePoint& n) const;

  /// True when every shell has degeneracy one.
  bool nondegenerate() const;

 private:
  friend MomentumBasis build_basis(int, double, std::size_t);

  std::vector<LatticePoint> points_;
  double delta_k_;
  int half_width_ = -1;
  std::vector<double> energies_;
  std::vector<std::size_t> shell_index_;
  ShellTable shells_;
};

/// Cubic lattice n in {-M..M}^3 in lexicographic order of n.
MomentumBasis build_basis(int half_width, double delta_k,
                          std::size_t max_points = kDefaultMaxPoints);

/// One-dimensional lattice k = n * delta_k, n = 1..N, stored as (n, 0, 0).
/// All energies are distinct.
MomentumBasis build_line_basis(int count, double delta_k,
                               std::size_t max_points = kDefaultMaxPoints);

nlohmann::json to_json(const MomentumBasis& basis);

}  // namespace lel
