#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "crad/graph.hpp"
#include "crad/pairs.hpp"

namespace crad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Lower clamp applied to lambda, pi, eta, mu and 1 - mu before any log.
inline constexpr double kEpsilon = 1e-12;

inline double floor_eps(double x) noexcept { return std::max(x, kEpsilon); }
inline double log_floor(double x) noexcept { return std::log(floor_eps(x)); }

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Theta = (u, v, w, eta, pi, mu).
///   u: N x K out-going memberships     v: N x K in-coming memberships
///   w: K x K affinity                  eta: pair-interaction coefficient
///   pi: anomalous edge rate            mu: prior probability a pair is anomalous
struct LatentParameters {
  Matrix u;
  Matrix v;
  Matrix w;
  double eta = 1.0;
  double pi = 0.1;
  double mu = 0.1;
  /// Seed that produced this parameter set (initialization or generation).
  std::uint64_t seed = 0;

  std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(u.rows()); }
  std::size_t k() const noexcept { return static_cast<std::size_t>(w.rows()); }

  /// Throws ModelError when shapes disagree or a constraint is violated.
  void validate() const;

  bool operator==(const LatentParameters& o) const {
    return u == o.u && v == o.v && w == o.w && eta == o.eta && pi == o.pi &&
           mu == o.mu && seed == o.seed;
  }
};

/// Bivariate Bernoulli table for one unordered pair; p_nm = P(A_ij=n, A_ji=m).
struct PairDistribution {
  double p00 = 1.0;
  double p01 = 0.0;
  double p10 = 0.0;
  double p11 = 0.0;
  double z = 1.0;

  double prob(int a_ij, int a_ji) const noexcept {
    if (a_ij) return a_ji ? p11 : p10;
    return a_ji ? p01 : p00;
  }
  double sum() const noexcept { return p00 + p01 + p10 + p11; }
};

enum class PairLabel { regular, anomalous };

/// Exponential-family form: f_ij, f_ji (log-odds) and the interaction J.
struct NaturalParams {
  double f_ij = 0.0;
  double f_ji = 0.0;
  double j_pair = 0.0;
};

/// lambda_ij = sum_{k,q} u_ik v_jq w_kq.
double lambda(const LatentParameters& theta, NodeIndex i, NodeIndex j);

PairDistribution regular_pair_distribution(double lambda_ij, double lambda_ji,
                                           double eta) noexcept;
PairDistribution regular_pair_distribution(const LatentParameters& theta,
                                           NodeIndex i, NodeIndex j);

PairDistribution anomalous_pair_distribution(double pi) noexcept;
inline PairDistribution anomalous_pair_distribution(const LatentParameters& theta) noexcept {
  return anomalous_pair_distribution(theta.pi);
}

/// Throws ModelError if a needed lambda or pi is zero; callers floor first.
NaturalParams natural_params(const LatentParameters& theta, NodeIndex i,
                             NodeIndex j, PairLabel label);

/// E[A_ij] given the pair's anomaly posterior q.
double expected_edge(const LatentParameters& theta, double q, NodeIndex i,
                     NodeIndex j);

/// P(A_ij = a), mixing both labels with prior mu and marginalizing A_ji.
double marginal_edge_density(const LatentParameters& theta, NodeIndex i,
                             NodeIndex j, int a);

/// P(A_ij = a_ij | A_ji = a_ji).
double conditional_edge_density(const LatentParameters& theta, NodeIndex i,
                                NodeIndex j, int a_ij, int a_ji);

/// Variational lower bound on the log-posterior (uniform-prior constants
/// dropped), summed over unordered pairs not excluded by `held_out`.
double log_posterior(const LatentParameters& theta, const DirectedGraph& g,
                     const PairValues& q, const PairMask* held_out = nullptr);

/// Row-wise lambda evaluation for sweeps over all pairs: with Y = U W,
/// lambda_ij = Y_i . V_j. Rebuild after u or w change.
class LambdaTable {
 public:
  explicit LambdaTable(const LatentParameters& theta)
      : uw_(theta.u * theta.w), v_(&theta.v) {}

  double operator()(NodeIndex i, NodeIndex j) const {
    return uw_.row(i).dot(v_->row(j));
  }
  /// out[j] = lambda_ij for every j.
  void row_out(NodeIndex i, Eigen::VectorXd& out) const {
    out.noalias() = (*v_) * uw_.row(i).transpose();
  }
  /// in[j] = lambda_ji for every j.
  void row_in(NodeIndex i, Eigen::VectorXd& in) const {
    in.noalias() = uw_ * v_->row(i).transpose();
  }

 private:
  Matrix uw_;
  const Matrix* v_;
};

}  // namespace crad
