#pragma once

// Slow reference EM: every sum is a literal loop over node pairs, lambda is
// recomputed from scratch wherever it is needed, and held-out pairs are
// simply skipped by `include`. Used to cross-check the library's sweeps.

#include <functional>
#include <vector>

#include "oracles.hpp"

namespace crad::oracle {

struct ReferenceOptions {
  bool anomalies = true;       // false: Q stays 0, pi and mu untouched
  bool freeze_pi_mu = false;
};

using PairFilter = std::function<bool(std::size_t, std::size_t)>;

/// One EM iteration: Q, then u (node by node), v (node by node), w, eta,
/// pi, mu. Returns Q in row-major upper-triangle order.
std::vector<double> reference_iteration(LatentParameters& t, const Dense& a,
                                        const PairFilter& include,
                                        const ReferenceOptions& opt = {});

}  // namespace crad::oracle
