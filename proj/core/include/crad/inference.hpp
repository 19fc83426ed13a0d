#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crad/graph.hpp"
#include "crad/model.hpp"
#include "crad/pairs.hpp"

namespace crad {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// E-step output.
///   rho: for every edge of g (in g.edges() order) a K x K table, row-major,
///        rho[e*K*K + k*K + q] = u_ik v_jq w_kq / lambda_ij.
///   q:   per unordered pair posterior probability of being anomalous.
struct VariationalState {
  std::size_t k = 0;
  std::vector<double> rho;
  PairValues q;

  const double* rho_table(std::size_t edge) const { return rho.data() + edge * k * k; }
};

/// Which terms the EM loop updates.
enum class ModelVariant {
  /// Communities, reciprocity and anomalies.
  full,
  /// Q held at zero; pi and mu untouched. Community-reciprocity baseline.
  regular_only,
};

struct EtaSolverOptions {
  std::size_t max_iter = 100;
  double tol = 1e-8;
  double damping = 0.5;
};

struct FitConfig {
  std::size_t k = 2;
  std::size_t max_iter = 1000;
  double convergence_tol = 1e-4;
  std::size_t check_every = 10;
  std::size_t n_restarts = 5;
  std::uint64_t rng_seed = 0;
  double eta_init = 1.0;
  double pi_init = 1.0;
  double mu_init = 0.1;
  std::size_t fixed_point_max_iter = 100;
  double fixed_point_tol = 1e-8;
  /// Keep pi and mu at their initial values (ablations, mu = 0 reduction).
  bool freeze_pi_mu = false;
  ModelVariant variant = ModelVariant::full;
  /// Refuse dense Q beyond this many nodes unless allow_large is set.
  std::size_t max_nodes = 20000;
  bool allow_large = false;
  /// Restarts run concurrently on up to this many threads; results do not
  /// depend on the value.
  std::size_t threads = 1;
  /// Rescale the random initial w so the mean lambda matches the observed
  /// edge density. Unit-scale draws make every pair look dense at the start.
  bool scale_init = true;
  /// Overrides the random draw of u, v, w for every restart when set.
  std::optional<LatentParameters> initial_theta;

  /// Throws FitError on an invalid combination.
  void validate() const;
  EtaSolverOptions eta_options() const {
    return {fixed_point_max_iter, fixed_point_tol, 0.5};
  }
};

/// Degenerate configurations hit by M-step updates.
struct UpdateFlags {
  std::size_t zero_denominator = 0;
  bool pi_denominator_zero = false;
  bool eta_fallback = false;
  bool eta_at_upper_bracket = false;
};

struct FitResult {
  LatentParameters theta;
  VariationalState state;
  double final_objective = 0.0;
  std::vector<double> objective_trace;
  std::size_t iterations_run = 0;
  bool converged = false;
  std::size_t restart_index = 0;
  /// Final objective of each restart (NaN for aborted ones).
  std::vector<double> restart_objectives;
  std::vector<std::string> warnings;
};

/// Random start: u, v, w i.i.d. uniform(0, 1); eta, pi, mu from the config.
LatentParameters initial_parameters(std::size_t n_nodes, const FitConfig& config,
                                    std::uint64_t seed);

// ---- E-step -----------------------------------------------------------------

std::vector<double> e_step_rho(const LatentParameters& theta, const DirectedGraph& g);

/// Posterior anomaly probability for every unordered pair, in log space.
/// Held-out pairs are left at zero.
PairValues e_step_q(const LatentParameters& theta, const DirectedGraph& g,
                    const PairMask* held_out = nullptr);

/// Q of one pair given its two observed entries.
double pair_posterior(double lambda_ij, double lambda_ji, int a_ij, int a_ji,
                      const LatentParameters& theta);

// ---- M-step -----------------------------------------------------------------

struct Memberships {
  Matrix u;
  Matrix v;
};

/// Closed-form membership updates. Nodes are swept in index order and each
/// update sees the rows already updated in the sweep; u is swept first with
/// the E-step responsibilities, then v with responsibilities refreshed for
/// the new u.
Memberships m_step_memberships(const LatentParameters& theta, const DirectedGraph& g,
                               const VariationalState& state,
                               const PairMask* held_out = nullptr,
                               UpdateFlags* flags = nullptr);

/// Affinity update with responsibilities recomputed from the current u, v.
Matrix m_step_affinity(const LatentParameters& theta, const DirectedGraph& g,
                       const VariationalState& state,
                       const PairMask* held_out = nullptr,
                       UpdateFlags* flags = nullptr);

/// Solves the stationarity condition for eta by damped fixed-point iteration,
/// falling back to a bracketed root finder.
double m_step_eta(const LatentParameters& theta, const DirectedGraph& g,
                  const VariationalState& state,
                  const EtaSolverOptions& options = {},
                  const PairMask* held_out = nullptr,
                  UpdateFlags* flags = nullptr);

/// pi' = sum Q (A_ij + A_ji) / sum Q (2 - A_ij - A_ji); keeps `previous_pi`
/// when the denominator vanishes.
double m_step_pi(const DirectedGraph& g, const VariationalState& state,
                 double previous_pi, const PairMask* held_out = nullptr,
                 UpdateFlags* flags = nullptr);

/// Mean of Q over the included pairs, clamped to [eps, 1 - eps].
double m_step_mu(const VariationalState& state, std::size_t n_nodes,
                 const PairMask* held_out = nullptr);

// ---- driver -----------------------------------------------------------------

/// One EM iteration (E-step, then the M-step in the order u, v, w, eta, pi,
/// mu). Returns the flags raised by the updates.
UpdateFlags em_iteration(LatentParameters& theta, VariationalState& state,
                         const DirectedGraph& g, const FitConfig& config,
                         const PairMask* held_out = nullptr);

/// Runs config.n_restarts EM restarts and returns the one with the highest
/// final objective. Pairs flagged in `held_out` take no part in any sum.
FitResult fit(const DirectedGraph& g, const FitConfig& config,
              const PairMask* held_out = nullptr);

}  // namespace crad
