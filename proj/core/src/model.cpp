#include "crad/model.hpp"

#include <string>

namespace crad {

void LatentParameters::validate() const {
  const auto n = u.rows();
  const auto k = u.cols();
  if (k < 1) throw ModelError("K must be at least 1");
  if (v.rows() != n || v.cols() != k) throw ModelError("v shape differs from u");
  if (w.rows() != k || w.cols() != k) throw ModelError("w must be K x K");
  if ((u.array() < 0).any() || (v.array() < 0).any() || (w.array() < 0).any()) {
    throw ModelError("u, v and w must be nonnegative");
  }
  if (!u.allFinite() || !v.allFinite() || !w.allFinite()) {
    throw ModelError("u, v and w must be finite");
  }
  if (!(eta > 0) || !std::isfinite(eta)) throw ModelError("eta must be positive");
  if (!(pi > 0) || !std::isfinite(pi)) throw ModelError("pi must be positive");
  if (!(mu >= 0 && mu <= 1)) throw ModelError("mu must lie in [0, 1]");
}

double lambda(const LatentParameters& theta, NodeIndex i, NodeIndex j) {
  return theta.u.row(i).dot(theta.v.row(j) * theta.w.transpose());
}

PairDistribution regular_pair_distribution(double lambda_ij, double lambda_ji,
                                           double eta) noexcept {
  const double both = eta * lambda_ij * lambda_ji;
  const double z = lambda_ij + lambda_ji + both + 1.0;
  return {1.0 / z, lambda_ji / z, lambda_ij / z, both / z, z};
}

PairDistribution regular_pair_distribution(const LatentParameters& theta,
                                           NodeIndex i, NodeIndex j) {
  return regular_pair_distribution(lambda(theta, i, j), lambda(theta, j, i),
                                   theta.eta);
}

PairDistribution anomalous_pair_distribution(double pi) noexcept {
  const double z = (1.0 + pi) * (1.0 + pi);
  const double single = pi / z;
  return {1.0 / z, single, single, pi * pi / z, z};
}

NaturalParams natural_params(const LatentParameters& theta, NodeIndex i,
                             NodeIndex j, PairLabel label) {
  if (label == PairLabel::anomalous) {
    if (!(theta.pi > 0)) throw ModelError("log of non-positive pi");
    const double f = std::log(theta.pi);
    return {f, f, 0.0};
  }
  const double l_ij = lambda(theta, i, j);
  const double l_ji = lambda(theta, j, i);
  if (!(l_ij > 0) || !(l_ji > 0)) {
    throw ModelError("log of zero lambda for pair (" + std::to_string(i) + ", " +
                     std::to_string(j) + ")");
  }
  if (!(theta.eta > 0)) throw ModelError("log of non-positive eta");
  return {std::log(l_ij), std::log(l_ji), std::log(theta.eta)};
}

double expected_edge(const LatentParameters& theta, double q, NodeIndex i,
                     NodeIndex j) {
  const double l_ij = lambda(theta, i, j);
  const double l_ji = lambda(theta, j, i);
  const double z = l_ij + l_ji + theta.eta * l_ij * l_ji + 1.0;
  return (1.0 - q) * (l_ij + theta.eta * l_ij * l_ji) / z +
         q * theta.pi / (1.0 + theta.pi);
}

double marginal_edge_density(const LatentParameters& theta, NodeIndex i,
                             NodeIndex j, int a) {
  const auto reg = regular_pair_distribution(theta, i, j);
  const auto anom = anomalous_pair_distribution(theta.pi);
  const double p_reg = a ? reg.p10 + reg.p11 : reg.p00 + reg.p01;
  const double p_anom = a ? anom.p10 + anom.p11 : anom.p00 + anom.p01;
  return (1.0 - theta.mu) * p_reg + theta.mu * p_anom;
}

double conditional_edge_density(const LatentParameters& theta, NodeIndex i,
                                NodeIndex j, int a_ij, int a_ji) {
  const double denom = marginal_edge_density(theta, j, i, a_ji);
  if (!(denom > 0)) throw ModelError("conditional on a zero-probability event");
  const auto reg = regular_pair_distribution(theta, i, j);
  const auto anom = anomalous_pair_distribution(theta.pi);
  return ((1.0 - theta.mu) * reg.prob(a_ij, a_ji) +
          theta.mu * anom.prob(a_ij, a_ji)) /
         denom;
}

double log_posterior(const LatentParameters& theta, const DirectedGraph& g,
                     const PairValues& q, const PairMask* held_out) {
  const std::size_t n = g.n_nodes();
  if (q.n_nodes() != n || theta.n_nodes() != n) {
    throw ModelError("log_posterior: dimension mismatch");
  }
  const double log_eta = log_floor(theta.eta);
  const double log_pi = log_floor(theta.pi);
  const double log_pi1 = 2.0 * std::log1p(theta.pi);
  const double log_mu = log_floor(theta.mu);
  const double log_1mu = log_floor(1.0 - theta.mu);

  const LambdaTable lam(theta);
  Eigen::VectorXd out(n), in(n);
  std::vector<std::uint8_t> row_out(n), row_in(n);

  double total = 0.0;
  for (NodeIndex i = 0; i + 1 < n; ++i) {
    lam.row_out(i, out);
    lam.row_in(i, in);
    std::fill(row_out.begin(), row_out.end(), 0);
    std::fill(row_in.begin(), row_in.end(), 0);
    for (NodeIndex j : g.out_neighbors(i)) row_out[j] = 1;
    for (NodeIndex j : g.in_neighbors(i)) row_in[j] = 1;

    for (NodeIndex j = i + 1; j < n; ++j) {
      const std::size_t p = pair_index(n, i, j);
      if (held_out && held_out->at_index(p)) continue;
      const double qij = q.at_index(p);
      const int a_ij = row_out[j];
      const int a_ji = row_in[j];
      const double l_ij = out[j];
      const double l_ji = in[j];

      double entropy = 0.0;
      if (qij > 0.0) entropy -= qij * std::log(qij);
      if (qij < 1.0) entropy -= (1.0 - qij) * std::log1p(-qij);

      double regular = -std::log(l_ij + l_ji + theta.eta * l_ij * l_ji + 1.0);
      if (a_ij) regular += log_floor(l_ij);
      if (a_ji) regular += log_floor(l_ji);
      if (a_ij && a_ji) regular += log_eta;

      const double anomalous = (a_ij + a_ji) * log_pi - log_pi1;

      double term = entropy;
      if (qij < 1.0) term += (1.0 - qij) * (regular + log_1mu);
      if (qij > 0.0) term += qij * (anomalous + log_mu);
      total += term;
    }
  }
  return total;
}

}  // namespace crad
