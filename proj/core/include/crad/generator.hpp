#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "crad/graph.hpp"
#include "crad/model.hpp"

namespace crad {

class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ground-truth memberships: K equal contiguous blocks. A fraction `overlap`
/// of nodes (chosen with the seed) splits its weight evenly between its own
/// block and a second one. Unless `distinct_in_out` is set, v = u.
struct MembershipSpec {
  double overlap = 0.0;
  bool distinct_in_out = false;
};

/// w = diag(assortativity) + off_diagonal elsewhere, before calibration.
struct AffinitySpec {
  double assortativity = 1.0;
  double off_diagonal = 0.1;
};

struct GeneratorConfig {
  std::size_t n_nodes = 500;
  std::size_t k = 3;
  /// Expected number of directed edges.
  double target_edges = 15000.0;
  /// Expected fraction of directed edges produced by anomalous pairs.
  double anomaly_density = 0.1;
  double eta = 1.0;
  double pi = 1.0;
  MembershipSpec membership;
  AffinitySpec affinity;
  std::uint64_t seed = 0;

  /// Throws GeneratorError.
  void validate() const;
};

struct SyntheticNetwork {
  DirectedGraph graph;
  PairLabels labels;
  /// Parameters the network was drawn from; w already carries zeta.
  LatentParameters ground_truth;
  double zeta = 1.0;
};

struct Calibration {
  double zeta = 1.0;
  double mu = 0.0;
};

/// u, v, w before calibration (eta, pi from the config, mu = 0).
LatentParameters ground_truth_parameters(const GeneratorConfig& config);

/// Expected regular directed-edge count sum_{i != j} (zeta l_ij + eta zeta^2
/// l_ij l_ji) / Z(zeta), without the (1 - mu) factor.
double expected_regular_edges(const LatentParameters& raw, double zeta);

/// Chooses mu so anomalous pairs carry E rho_a directed edges in expectation
/// and zeta so regular pairs carry the rest.
Calibration calibrate_sparsity(const GeneratorConfig& config,
                               const LatentParameters& raw);

SyntheticNetwork sample(const GeneratorConfig& config);

/// (A_ij, A_ji) drawn from `d` by inverting its CDF at x in [0, 1).
std::pair<int, int> draw_pair(const PairDistribution& d, double x) noexcept;

}  // namespace crad
