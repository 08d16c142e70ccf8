#include "lel/basis.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lel {

namespace {

long squared_norm(const LatticePoint& n) {
  return static_cast<long>(n[0]) * n[0] + static_cast<long>(n[1]) * n[1] +
         static_cast<long>(n[2]) * n[2];
}

}  // namespace

MomentumBasis::MomentumBasis(std::vector<LatticePoint> points, double delta_k)
    : points_(std::move(points)), delta_k_(delta_k) {
  if (!(delta_k_ > 0.0)) {
    throw std::invalid_argument("delta_k must be positive");
  }
  if (points_.empty()) {
    throw std::invalid_argument("basis must contain at least one point");
  }
  const double dk2 = delta_k_ * delta_k_;
  energies_.reserve(points_.size());
  for (const auto& n : points_) {
    energies_.push_back(static_cast<double>(squared_norm(n)) * dk2);
  }

  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return energies_[a] < energies_[b];
  });

  shell_index_.assign(points_.size(), 0);
  const double tol = shell_tolerance();
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t idx = order[pos];
    if (shells_.shell_energies.empty() ||
        energies_[idx] - shells_.shell_energies.back() > tol) {
      shells_.shell_energies.push_back(energies_[idx]);
      shells_.members.emplace_back();
    }
    shells_.members.back().push_back(idx);
    shell_index_[idx] = shells_.shell_energies.size() - 1;
  }
  for (auto& m : shells_.members) {
    std::sort(m.begin(), m.end());
    shells_.degeneracy.push_back(m.size());
  }
}

std::array<double, 3> MomentumBasis::momentum(std::size_t index) const {
  const auto& n = points_.at(index);
  return {n[0] * delta_k_, n[1] * delta_k_, n[2] * delta_k_};
}

std::size_t MomentumBasis::shell_of(std::size_t index) const {
  if (index >= points_.size()) {
    throw std::out_of_range("basis index " + std::to_string(index) + " out of range (size " +
                            std::to_string(points_.size()) + ")");
  }
  return shell_index_[index];
}

std::size_t MomentumBasis::index_of(const LatticePoint& n) const {
  const auto it = std::find(points_.begin(), points_.end(), n);
  if (it == points_.end()) {
    throw std::out_of_range("lattice point not in basis");
  }
  return static_cast<std::size_t>(it - points_.begin());
}

bool MomentumBasis::nondegenerate() const {
  return std::all_of(shells_.degeneracy.begin(), shells_.degeneracy.end(),
                     [](std::size_t d) { return d == 1; });
}

MomentumBasis build_basis(int half_width, double delta_k, std::size_t max_points) {
  if (half_width < 0) {
    throw std::invalid_argument("lattice half-width M must be nonnegative");
  }
  if (!(delta_k > 0.0)) {
    throw std::invalid_argument("delta_k must be positive");
  }
  const auto side = static_cast<unsigned long long>(2 * static_cast<long long>(half_width) + 1);
  if (static_cast<long double>(side) * side * side > static_cast<long double>(max_points)) {
    throw DimensionCapError("lattice with M=" + std::to_string(half_width) + " exceeds " +
                            std::to_string(max_points) + " points");
  }
  std::vector<LatticePoint> points;
  points.reserve(side * side * side);
  for (int a = -half_width; a <= half_width; ++a) {
    for (int b = -half_width; b <= half_width; ++b) {
      for (int c = -half_width; c <= half_width; ++c) {
        points.push_back({a, b, c});
      }
    }
  }
  MomentumBasis basis(std::move(points), delta_k);
  basis.half_width_ = half_width;
  return basis;
}

MomentumBasis build_line_basis(int count, double delta_k, std::size_t max_points) {
  if (count < 1) {
    throw std::invalid_argument("line lattice needs N >= 1");
  }
  if (static_cast<std::size_t>(count) > max_points) {
    throw DimensionCapError("line lattice with N=" + std::to_string(count) + " exceeds " +
                            std::to_string(max_points) + " points");
  }
  std::vector<LatticePoint> points;
  points.reserve(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n) {
    points.push_back({n, 0, 0});
  }
  return MomentumBasis(std::move(points), delta_k);
}

nlohmann::json to_json(const MomentumBasis& basis) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& n : basis.points()) {
    pts.push_back({n[0], n[1], n[2]});
  }
  return {
      {"M", basis.half_width()},
      {"delta_k", basis.delta_k()},
      {"points", std::move(pts)},
      {"shell_energies", basis.shells().shell_energies},
      {"shell_members", basis.shells().members},
  };
}

}  // namespace lel
