#pragma once

#include <json.hpp>

#include "lel/common.hpp"
#include "lel/quantum_states.hpp"

namespace lel {

/// Nested rows of [re, im] pairs.
nlohmann::json matrix_to_json(const CMatrix<double>& m);
CMatrix<double> matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DensityMatrix<double>& rho);
/// Parses and validates; throws InvariantError for an invalid matrix.
DensityMatrix<double> density_from_json(const nlohmann::json& j);

}  // namespace lel
