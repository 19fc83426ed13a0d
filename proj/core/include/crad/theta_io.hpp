#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "crad/model.hpp"

namespace crad {

/// JSON document holding a parameter set:
///
///   {
///     "format": "crad-theta", "version": 1,
///     "n_nodes": N, "k": K,
///     "u": [[...K values...] x N], "v": [[...] x N], "w": [[...] x K],
///     "eta": ..., "pi": ..., "mu": ..., "seed": ...,
///     "node_ids": ["id0", ...]          (optional)
///   }
///
/// Doubles are written in shortest round-trip form, so reading back yields
/// bit-identical values.
struct ThetaDocument {
  LatentParameters theta;
  std::vector<std::string> node_ids;
};

std::string theta_to_json(const LatentParameters& theta,
                          const std::vector<std::string>& node_ids = {});
ThetaDocument theta_from_json(const std::string& text);

void save_theta(const LatentParameters& theta, const std::filesystem::path& path,
                const std::vector<std::string>& node_ids = {});
ThetaDocument load_theta(const std::filesystem::path& path);

/// Q file: one "id_i id_j q" line per unordered pair, i < j by index.
void save_q(const PairValues& q, const DirectedGraph& g,
            const std::filesystem::path& path);
PairValues load_q(const std::filesystem::path& path, const DirectedGraph& g);

}  // namespace crad
