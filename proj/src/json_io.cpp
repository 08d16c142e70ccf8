#include "lel/json_io.hpp"

#include <stdexcept>

namespace lel {

nlohmann::json matrix_to_json(const CMatrix<double>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix<double> matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("matrix must be a non-empty array of rows");
  }
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  CMatrix<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw std::invalid_argument("matrix rows must have equal length");
    }
    for (Index c = 0; c < cols; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        m(i, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, c) = {e[0].get<double>(), e[1].get<double>()};
      } else {
        throw std::invalid_argument("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

nlohmann::json to_json(const DensityMatrix<double>& rho) { return matrix_to_json(rho.matrix()); }

DensityMatrix<double> density_from_json(const nlohmann::json& j) {
  return DensityMatrix<double>(matrix_from_json(j));
}

}  // namespace lel
