#include "crad/generator.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "crad/rng.hpp"

namespace crad {

namespace {

double ordered_pairs(std::size_t n) {
  return static_cast<double>(n) * static_cast<double>(n - 1);
}

}  // namespace

std::pair<int, int> draw_pair(const PairDistribution& d, double x) noexcept {
  // Order: 00, 01, 10, 11.
  double acc = d.p00;
  if (x < acc) return {0, 0};
  acc += d.p01;
  if (x < acc) return {0, 1};
  acc += d.p10;
  if (x < acc) return {1, 0};
  return {1, 1};
}

void GeneratorConfig::validate() const {
  if (n_nodes < 2) throw GeneratorError("need at least two nodes");
  if (k < 1 || k > n_nodes) throw GeneratorError("K must lie in [1, N]");
  if (!(target_edges > 0.0) || target_edges > ordered_pairs(n_nodes)) {
    throw GeneratorError("target edge count must lie in (0, N(N-1)]");
  }
  if (!(anomaly_density >= 0.0 && anomaly_density <= 1.0)) {
    throw GeneratorError("anomaly density must lie in [0, 1]");
  }
  if (!(eta > 0.0) || !(pi > 0.0)) throw GeneratorError("eta and pi must be positive");
  if (!(membership.overlap >= 0.0 && membership.overlap <= 1.0)) {
    throw GeneratorError("overlap must lie in [0, 1]");
  }
  if (!(affinity.assortativity >= 0.0) || !(affinity.off_diagonal >= 0.0) ||
      !(affinity.assortativity + affinity.off_diagonal > 0.0)) {
    throw GeneratorError("affinity entries must be nonnegative and not all zero");
  }
}

LatentParameters ground_truth_parameters(const GeneratorConfig& config) {
  config.validate();
  const std::size_t n = config.n_nodes;
  const std::size_t k = config.k;
  LatentParameters theta;
  theta.u = Matrix::Zero(n, k);
  for (std::size_t i = 0; i < n; ++i) theta.u(i, i * k / n) = 1.0;

  Rng rng(derive_seed(config.seed, 0x6d656d62));
  auto add_overlap = [&](Matrix& m) {
    if (k < 2 || config.membership.overlap <= 0.0) return;
    for (std::size_t i = 0; i < n; ++i) {
      const bool mixed = rng.bernoulli(config.membership.overlap);
      const std::size_t other = static_cast<std::size_t>(rng.below(k - 1));
      if (!mixed) continue;
      const std::size_t own = i * k / n;
      const std::size_t second = other >= own ? other + 1 : other;
      m(i, own) = 0.5;
      m(i, second) = 0.5;
    }
  };
  add_overlap(theta.u);
  theta.v = theta.u;
  if (config.membership.distinct_in_out) {
    theta.v = Matrix::Zero(n, k);
    for (std::size_t i = 0; i < n; ++i) theta.v(i, i * k / n) = 1.0;
    add_overlap(theta.v);
  }

  theta.w = Matrix::Constant(k, k, config.affinity.off_diagonal);
  theta.w.diagonal().setConstant(config.affinity.assortativity);
  theta.eta = config.eta;
  theta.pi = config.pi;
  theta.mu = 0.0;
  theta.seed = config.seed;
  return theta;
}

double expected_regular_edges(const LatentParameters& raw, double zeta) {
  const std::size_t n = raw.n_nodes();
  const LambdaTable lam(raw);
  Eigen::VectorXd out(n), in(n);
  double total = 0.0;
  for (NodeIndex i = 0; i + 1 < n; ++i) {
    lam.row_out(i, out);
    lam.row_in(i, in);
    for (NodeIndex j = i + 1; j < n; ++j) {
      const double a = zeta * out[j];
      const double b = zeta * in[j];
      const double both = raw.eta * a * b;
      total += (a + b + 2.0 * both) / (a + b + both + 1.0);
    }
  }
  return total;
}

Calibration calibrate_sparsity(const GeneratorConfig& config,
                               const LatentParameters& raw) {
  config.validate();
  const std::size_t n = config.n_nodes;
  const double anomalous_edges = config.target_edges * config.anomaly_density;
  const double regular_edges = config.target_edges - anomalous_edges;

  Calibration c;
  const double pair_rate = config.pi / (1.0 + config.pi);
  c.mu = anomalous_edges / (ordered_pairs(n) * pair_rate);
  if (c.mu > 1.0) {
    std::ostringstream msg;
    msg << "anomalous edge budget " << anomalous_edges << " exceeds the maximum "
        << ordered_pairs(n) * pair_rate << " reachable with pi = " << config.pi;
    throw GeneratorError(msg.str());
  }
  if (regular_edges <= 0.0) {
    c.zeta = 0.0;
    return c;
  }

  // Regular budget as zeta -> infinity: 2 per pair with both lambdas positive,
  // 1 per pair with one.
  double reachable = 0.0;
  {
    const LambdaTable lam(raw);
    Eigen::VectorXd out(n), in(n);
    for (NodeIndex i = 0; i + 1 < n; ++i) {
      lam.row_out(i, out);
      lam.row_in(i, in);
      for (NodeIndex j = i + 1; j < n; ++j) {
        reachable += (out[j] > 0.0 ? 1.0 : 0.0) + (in[j] > 0.0 ? 1.0 : 0.0);
      }
    }
  }
  const double needed = regular_edges / (1.0 - c.mu);
  if (!(needed < reachable)) {
    std::ostringstream msg;
    msg << "regular edge budget " << regular_edges
        << " is not reachable; the feasible range is (0, " << (1.0 - c.mu) * reachable
        << ") for this community structure and anomaly density";
    throw GeneratorError(msg.str());
  }

  auto residual = [&](double zeta) { return expected_regular_edges(raw, zeta) - needed; };
  double upper = 1.0;
  while (residual(upper) < 0.0) {
    upper *= 2.0;
    if (upper > 1e300) throw GeneratorError("sparsity calibration did not bracket a root");
  }
  std::uintmax_t max_iter = 200;
  const auto r = boost::math::tools::toms748_solve(
      residual, 0.0, upper, -needed, residual(upper),
      boost::math::tools::eps_tolerance<double>(45), max_iter);
  c.zeta = 0.5 * (r.first + r.second);
  return c;
}

SyntheticNetwork sample(const GeneratorConfig& config) {
  LatentParameters theta = ground_truth_parameters(config);
  const Calibration cal = calibrate_sparsity(config, theta);
  theta.w *= cal.zeta;
  theta.mu = cal.mu;

  const std::size_t n = config.n_nodes;
  const PairDistribution anomalous = anomalous_pair_distribution(theta.pi);
  const std::uint64_t stream = derive_seed(config.seed, 0x70616972);
  const LambdaTable lam(theta);
  Eigen::VectorXd out(n), in(n);

  std::vector<Edge> edges;
  std::vector<Edge> flagged;
  std::size_t p = 0;
  for (NodeIndex i = 0; i + 1 < n; ++i) {
    lam.row_out(i, out);
    lam.row_in(i, in);
    for (NodeIndex j = i + 1; j < n; ++j, ++p) {
      const std::uint64_t h = splitmix64(stream ^ splitmix64(p));
      const bool is_anomalous = bits_to_unit(h) < theta.mu;
      const double x = bits_to_unit(splitmix64(h));
      const PairDistribution d = is_anomalous
                                     ? anomalous
                                     : regular_pair_distribution(out[j], in[j], theta.eta);
      const auto [a_ij, a_ji] = draw_pair(d, x);
      if (a_ij) edges.emplace_back(i, j);
      if (a_ji) edges.emplace_back(j, i);
      if (is_anomalous) flagged.emplace_back(i, j);
    }
  }

  SyntheticNetwork net;
  net.graph = DirectedGraph(n, std::move(edges));
  net.labels = PairLabels(n, std::move(flagged));
  net.ground_truth = std::move(theta);
  net.zeta = cal.zeta;
  return net;
}

}  // namespace crad
