#pragma once

#include <cstddef>
#include <vector>

#include "crad/model.hpp"

namespace crad {

/// Square assignment maximizing sum_r score(r, match[r]) (Hungarian method,
/// O(K^3)). Returns match[r] = column assigned to row r.
std::vector<std::size_t> max_weight_assignment(const Matrix& score);

}  // namespace crad
