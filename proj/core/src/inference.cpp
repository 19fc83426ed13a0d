#include "crad/inference.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "crad/parallel.hpp"
#include "crad/rng.hpp"

namespace crad {

namespace {

/// Dense 0/1 markers of A_ij and A_ji for one row i; reset touches only the
/// neighbours that were set.
class RowAdjacency {
 public:
  explicit RowAdjacency(std::size_t n) : out_(n, 0), in_(n, 0) {}

  void load(const DirectedGraph& g, NodeIndex i) {
    clear();
    row_ = i;
    g_ = &g;
    for (NodeIndex j : g.out_neighbors(i)) out_[j] = 1;
    for (NodeIndex j : g.in_neighbors(i)) in_[j] = 1;
  }

  int out(NodeIndex j) const { return out_[j]; }
  int in(NodeIndex j) const { return in_[j]; }

 private:
  void clear() {
    if (!g_) return;
    for (NodeIndex j : g_->out_neighbors(row_)) out_[j] = 0;
    for (NodeIndex j : g_->in_neighbors(row_)) in_[j] = 0;
  }

  std::vector<std::uint8_t> out_;
  std::vector<std::uint8_t> in_;
  const DirectedGraph* g_ = nullptr;
  NodeIndex row_ = 0;
};

bool excluded(const PairMask* held_out, NodeIndex i, NodeIndex j) {
  return held_out && (*held_out)(i, j) != 0;
}

double weight_regular(const PairValues& q, NodeIndex i, NodeIndex j) {
  return 1.0 - q(i, j);
}

void check_state(const LatentParameters& theta, const DirectedGraph& g,
                 const VariationalState& state) {
  const std::size_t k = theta.k();
  if (theta.n_nodes() != g.n_nodes() || state.q.n_nodes() != g.n_nodes()) {
    throw FitError("state, parameters and graph disagree on node count");
  }
  if (state.k != k || state.rho.size() != g.n_edges() * k * k) {
    throw FitError("responsibilities do not match graph and K");
  }
}

double ratio_update(double num, double den, UpdateFlags* flags) {
  if (!(num > 0.0)) return 0.0;
  if (!(den > 0.0)) {
    if (flags) ++flags->zero_denominator;
    return 0.0;
  }
  return num / den;
}

}  // namespace

void FitConfig::validate() const {
  if (k < 1) throw FitError("K must be at least 1");
  if (max_iter < 1 || check_every < 1 || n_restarts < 1) {
    throw FitError("max_iter, check_every and n_restarts must be at least 1");
  }
  if (!(convergence_tol > 0) || !(fixed_point_tol > 0) || fixed_point_max_iter < 1) {
    throw FitError("tolerances must be positive");
  }
  if (!(eta_init > 0) || !(pi_init > 0)) throw FitError("eta_init and pi_init must be positive");
  if (!(mu_init >= 0 && mu_init <= 1)) throw FitError("mu_init must lie in [0, 1]");
  if (initial_theta) {
    if (initial_theta->k() != k) throw FitError("initial_theta has a different K");
    initial_theta->validate();
  }
}

LatentParameters initial_parameters(std::size_t n_nodes, const FitConfig& config,
                                    std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(n_nodes);
  const auto k = static_cast<Eigen::Index>(config.k);
  Rng rng(seed);
  LatentParameters theta;
  theta.u.resize(n, k);
  theta.v.resize(n, k);
  theta.w.resize(k, k);
  for (auto* m : {&theta.u, &theta.v, &theta.w}) {
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = 0; c < m->cols(); ++c) (*m)(r, c) = rng.uniform();
  }
  theta.eta = config.eta_init;
  theta.pi = config.pi_init;
  theta.mu = config.mu_init;
  theta.seed = seed;
  return theta;
}

// ---- E-step -----------------------------------------------------------------

std::vector<double> e_step_rho(const LatentParameters& theta, const DirectedGraph& g) {
  const std::size_t k = theta.k();
  const std::size_t kk = k * k;
  std::vector<double> rho(g.n_edges() * kk);
  std::size_t e = 0;
  for (const auto& [i, j] : g.edges()) {
    double* table = rho.data() + e * kk;
    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      const double ui = theta.u(i, a);
      for (std::size_t b = 0; b < k; ++b) {
        const double x = ui * theta.v(j, b) * theta.w(a, b);
        table[a * k + b] = x;
        total += x;
      }
    }
    if (total > 0.0) {
      for (std::size_t c = 0; c < kk; ++c) table[c] /= total;
    } else {
      std::fill(table, table + kk, 1.0 / static_cast<double>(kk));
    }
    ++e;
  }
  return rho;
}

double pair_posterior(double lambda_ij, double lambda_ji, int a_ij, int a_ji,
                      const LatentParameters& theta) {
  if (theta.mu <= 0.0) return 0.0;
  if (theta.mu >= 1.0) return 1.0;
  const double log_anomalous = (a_ij + a_ji) * log_floor(theta.pi) +
                               std::log(theta.mu) - 2.0 * std::log1p(theta.pi);
  double log_regular = std::log1p(-theta.mu) -
                       std::log(lambda_ij + lambda_ji +
                                theta.eta * lambda_ij * lambda_ji + 1.0);
  if (a_ij) log_regular += log_floor(lambda_ij);
  if (a_ji) log_regular += log_floor(lambda_ji);
  if (a_ij && a_ji) log_regular += log_floor(theta.eta);
  return 1.0 / (1.0 + std::exp(log_regular - log_anomalous));
}

PairValues e_step_q(const LatentParameters& theta, const DirectedGraph& g,
                    const PairMask* held_out) {
  const std::size_t n = g.n_nodes();
  PairValues q(n, 0.0);
  if (theta.mu <= 0.0) return q;

  // Empty pairs: Q = 1 / (1 + odds / Z) with a constant odds; no logs needed.
  const double empty_odds =
      theta.mu < 1.0 ? (1.0 - theta.mu) * (1.0 + theta.pi) * (1.0 + theta.pi) / theta.mu : 0.0;
  const bool fast_empty = std::isfinite(empty_odds);

  const LambdaTable lam(theta);
  RowAdjacency adj(n);
  Eigen::VectorXd out(n), in(n);
  for (NodeIndex i = 0; i + 1 < n; ++i) {
    lam.row_out(i, out);
    lam.row_in(i, in);
    adj.load(g, i);
    for (NodeIndex j = i + 1; j < n; ++j) {
      const std::size_t p = pair_index(n, i, j);
      if (held_out && held_out->at_index(p)) continue;
      const int a_ij = adj.out(j);
      const int a_ji = adj.in(j);
      if (fast_empty && !a_ij && !a_ji) {
        const double z = out[j] + in[j] + theta.eta * out[j] * in[j] + 1.0;
        q.at_index(p) = 1.0 / (1.0 + empty_odds / z);
      } else {
        q.at_index(p) = pair_posterior(out[j], in[j], a_ij, a_ji, theta);
      }
    }
  }
  return q;
}

// ---- M-step -----------------------------------------------------------------

Memberships m_step_memberships(const LatentParameters& theta, const DirectedGraph& g,
                               const VariationalState& state,
                               const PairMask* held_out, UpdateFlags* flags) {
  check_state(theta, g, state);
  const std::size_t n = g.n_nodes();
  const std::size_t k = theta.k();
  const double eta = theta.eta;

  Matrix u = theta.u;
  Matrix v = theta.v;
  Eigen::VectorXd lam_out(n), lam_in(n), weight(n);
  Eigen::VectorXd num(k), den(k);

  // u sweep: lambda_ij = u_i . X_j and lambda_ji = u_j . X_i, X = V W^T.
  const Matrix x = theta.v * theta.w.transpose();
  for (NodeIndex i = 0; i < n; ++i) {
    lam_out.noalias() = x * u.row(i).transpose();
    lam_in.noalias() = u * x.row(i).transpose();
    for (NodeIndex j = 0; j < n; ++j) {
      if (j == i || excluded(held_out, i, j)) {
        weight[j] = 0.0;
        continue;
      }
      const double z = lam_out[j] + lam_in[j] + eta * lam_out[j] * lam_in[j] + 1.0;
      weight[j] = weight_regular(state.q, i, j) * (1.0 + eta * lam_in[j]) / z;
    }
    den.noalias() = x.transpose() * weight;

    num.setZero();
    const std::size_t first = g.out_offset(i);
    const auto targets = g.out_neighbors(i);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const NodeIndex j = targets[t];
      if (excluded(held_out, i, j)) continue;
      const double c = weight_regular(state.q, i, j);
      const double* table = state.rho_table(first + t);
      for (std::size_t a = 0; a < k; ++a) {
        double s = 0.0;
        for (std::size_t b = 0; b < k; ++b) s += table[a * k + b];
        num[a] += c * s;
      }
    }
    for (std::size_t a = 0; a < k; ++a) u(i, a) = ratio_update(num[a], den[a], flags);
  }

  // v sweep: lambda_ij = Y_i . v_j and lambda_ji = Y_j . v_i, Y = U W.
  const Matrix y = u * theta.w;
  const double uniform_share = 1.0 / static_cast<double>(k);
  for (NodeIndex i = 0; i < n; ++i) {
    lam_out.noalias() = v * y.row(i).transpose();
    lam_in.noalias() = y * v.row(i).transpose();
    for (NodeIndex j = 0; j < n; ++j) {
      if (j == i || excluded(held_out, i, j)) {
        weight[j] = 0.0;
        continue;
      }
      const double z = lam_out[j] + lam_in[j] + eta * lam_out[j] * lam_in[j] + 1.0;
      weight[j] = weight_regular(state.q, i, j) * (1.0 + eta * lam_out[j]) / z;
    }
    den.noalias() = y.transpose() * weight;

    num.setZero();
    for (NodeIndex j : g.in_neighbors(i)) {
      if (excluded(held_out, i, j)) continue;
      const double c = weight_regular(state.q, i, j);
      const double l = lam_in[j];
      for (std::size_t b = 0; b < k; ++b) {
        num[b] += c * (l > 0.0 ? y(j, b) * v(i, b) / l : uniform_share);
      }
    }
    for (std::size_t b = 0; b < k; ++b) v(i, b) = ratio_update(num[b], den[b], flags);
  }
  return {std::move(u), std::move(v)};
}

Matrix m_step_affinity(const LatentParameters& theta, const DirectedGraph& g,
                       const VariationalState& state, const PairMask* held_out,
                       UpdateFlags* flags) {
  check_state(theta, g, state);
  const std::size_t n = g.n_nodes();
  const std::size_t k = theta.k();
  const double eta = theta.eta;
  const Matrix& u = theta.u;
  const Matrix& v = theta.v;
  const Matrix& w = theta.w;

  // Numerator: responsibilities of the observed edges at the current u, v, w.
  Matrix num = Matrix::Zero(k, k);
  const double uniform_share = 1.0 / static_cast<double>(k * k);
  for (const auto& [i, j] : g.edges()) {
    if (excluded(held_out, i, j)) continue;
    const double c = weight_regular(state.q, i, j);
    if (c <= 0.0) continue;
    double l = 0.0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) l += u(i, a) * v(j, b) * w(a, b);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        num(a, b) += c * (l > 0.0 ? u(i, a) * v(j, b) * w(a, b) / l : uniform_share);
      }
    }
  }

  // lin(k,q)  = sum_{i != j} (1-Q) u_ik v_jq / Z
  // quad(k,q) = sum_{i != j} (1-Q) u_ik v_jq lambda_ji / Z
  Matrix lin = Matrix::Zero(k, k);
  Matrix quad = Matrix::Zero(k, k);
  const LambdaTable lam(theta);
  Eigen::VectorXd lam_out(n), lam_in(n), a_w(n), b_w(n);
  for (NodeIndex i = 0; i < n; ++i) {
    lam.row_out(i, lam_out);
    lam.row_in(i, lam_in);
    for (NodeIndex j = 0; j < n; ++j) {
      if (j == i || excluded(held_out, i, j)) {
        a_w[j] = 0.0;
        b_w[j] = 0.0;
        continue;
      }
      const double z = lam_out[j] + lam_in[j] + eta * lam_out[j] * lam_in[j] + 1.0;
      a_w[j] = weight_regular(state.q, i, j) / z;
      b_w[j] = a_w[j] * lam_in[j];
    }
    const Eigen::RowVectorXd t = a_w.transpose() * v;
    const Eigen::RowVectorXd s = b_w.transpose() * v;
    lin.noalias() += u.row(i).transpose() * t;
    quad.noalias() += u.row(i).transpose() * s;
  }

  // Bounding lambda_ij * lambda_ji by a separable quadratic (AM-GM around
  // the current w) gives a per-entry surrogate
  //   num log w - lin w - (eta quad / 2 w_old) w^2,
  // whose maximizer shares its fixed points with w = num / (lin + eta quad).
  Matrix out(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const double nm = num(a, b);
      if (!(nm > 0.0) || !(w(a, b) > 0.0)) {
        out(a, b) = 0.0;
        continue;
      }
      const double e2 = eta * quad(a, b) / w(a, b);  // twice the w^2 coefficient
      const double d = lin(a, b);
      if (e2 <= 0.0) {
        out(a, b) = ratio_update(nm, d, flags);
        continue;
      }
      out(a, b) = 2.0 * nm / (d + std::sqrt(d * d + 4.0 * e2 * nm));
    }
  }
  return out;
}

double m_step_eta(const LatentParameters& theta, const DirectedGraph& g,
                  const VariationalState& state, const EtaSolverOptions& options,
                  const PairMask* held_out, UpdateFlags* flags) {
  check_state(theta, g, state);
  const std::size_t n = g.n_nodes();

  // Per pair: c = 1-Q, p = lambda_ij lambda_ji, b = lambda_ij + lambda_ji + 1.
  double reciprocated = 0.0;
  std::vector<double> cs, ps, bs;
  const LambdaTable lam(theta);
  RowAdjacency adj(n);
  Eigen::VectorXd lam_out(n), lam_in(n);
  for (NodeIndex i = 0; i + 1 < n; ++i) {
    lam.row_out(i, lam_out);
    lam.row_in(i, lam_in);
    adj.load(g, i);
    for (NodeIndex j = i + 1; j < n; ++j) {
      if (excluded(held_out, i, j)) continue;
      const double c = weight_regular(state.q, i, j);
      if (c <= 0.0) continue;
      if (adj.out(j) && adj.in(j)) reciprocated += c;
      const double p = lam_out[j] * lam_in[j];
      if (p <= 0.0) continue;
      cs.push_back(c);
      ps.push_back(p);
      bs.push_back(lam_out[j] + lam_in[j] + 1.0);
    }
  }
  if (!(reciprocated > 0.0)) return kEpsilon;

  auto denominator = [&](double eta) {
    double s = 0.0;
    for (std::size_t t = 0; t < cs.size(); ++t) s += cs[t] * ps[t] / (bs[t] + eta * ps[t]);
    return s;
  };
  // eta * dL/deta; strictly decreasing in eta.
  auto scaled_gradient = [&](double eta) {
    double s = 0.0;
    for (std::size_t t = 0; t < cs.size(); ++t) {
      s += cs[t] * eta * ps[t] / (bs[t] + eta * ps[t]);
    }
    return reciprocated - s;
  };

  constexpr double kInitialUpper = 1e4;
  constexpr double kMaxUpper = 1e12;

  double eta = floor_eps(theta.eta);
  if (!cs.empty()) {
    for (std::size_t it = 0; it < options.max_iter; ++it) {
      const double target = reciprocated / denominator(eta);
      const double next = (1.0 - options.damping) * eta + options.damping * target;
      const bool done = std::abs(next - eta) <= options.tol * std::max(1.0, eta);
      eta = next;
      if (done) return floor_eps(eta);
    }
  }

  if (flags) flags->eta_fallback = true;
  double upper = kInitialUpper;
  while (scaled_gradient(upper) > 0.0 && upper < kMaxUpper) upper *= 10.0;
  if (scaled_gradient(upper) > 0.0) {
    if (flags) flags->eta_at_upper_bracket = true;
    return upper;
  }
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      scaled_gradient, kEpsilon, upper, scaled_gradient(kEpsilon),
      scaled_gradient(upper), boost::math::tools::eps_tolerance<double>(50),
      max_iter);
  return floor_eps(0.5 * (bracket.first + bracket.second));
}

double m_step_pi(const DirectedGraph& g, const VariationalState& state,
                 double previous_pi, const PairMask* held_out, UpdateFlags* flags) {
  const std::size_t n = g.n_nodes();
  if (state.q.n_nodes() != n) throw FitError("Q and graph sizes differ");
  double present = 0.0;
  double absent = 0.0;
  RowAdjacency adj(n);
  for (NodeIndex i = 0; i + 1 < n; ++i) {
    adj.load(g, i);
    for (NodeIndex j = i + 1; j < n; ++j) {
      const std::size_t p = pair_index(n, i, j);
      if (held_out && held_out->at_index(p)) continue;
      const double q = state.q.at_index(p);
      const int s = adj.out(j) + adj.in(j);
      present += q * s;
      absent += q * (2 - s);
    }
  }
  if (!(absent > 0.0)) {
    if (flags) flags->pi_denominator_zero = true;
    return previous_pi;
  }
  return floor_eps(present / absent);
}

double m_step_mu(const VariationalState& state, std::size_t n_nodes,
                 const PairMask* held_out) {
  if (state.q.n_nodes() != n_nodes) throw FitError("Q size differs from node count");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < state.q.size(); ++p) {
    if (held_out && held_out->at_index(p)) continue;
    total += state.q.at_index(p);
    ++count;
  }
  const double mean = count ? total / static_cast<double>(count) : 0.0;
  return std::clamp(mean, kEpsilon, 1.0 - kEpsilon);
}

// ---- driver -----------------------------------------------------------------

UpdateFlags em_iteration(LatentParameters& theta, VariationalState& state,
                         const DirectedGraph& g, const FitConfig& config,
                         const PairMask* held_out) {
  UpdateFlags flags;
  state.k = theta.k();
  state.rho = e_step_rho(theta, g);
  if (config.variant == ModelVariant::full) {
    state.q = e_step_q(theta, g, held_out);
  } else if (state.q.n_nodes() != g.n_nodes()) {
    state.q = PairValues(g.n_nodes(), 0.0);
  }

  auto memberships = m_step_memberships(theta, g, state, held_out, &flags);
  theta.u = std::move(memberships.u);
  theta.v = std::move(memberships.v);
  theta.w = m_step_affinity(theta, g, state, held_out, &flags);
  theta.eta = m_step_eta(theta, g, state, config.eta_options(), held_out, &flags);
  if (config.variant == ModelVariant::full && !config.freeze_pi_mu) {
    theta.pi = m_step_pi(g, state, theta.pi, held_out, &flags);
    theta.mu = m_step_mu(state, g.n_nodes(), held_out);
  }
  return flags;
}

namespace {

struct RestartOutcome {
  FitResult result;
  bool ok = false;
  std::string failure;
};

void scale_to_density(LatentParameters& theta, const DirectedGraph& g) {
  const double n = static_cast<double>(g.n_nodes());
  const double density = static_cast<double>(g.n_edges()) / (n * (n - 1.0));
  const double mean_lambda =
      theta.u.colwise().sum().dot(theta.w * theta.v.colwise().sum().transpose()) / (n * n);
  if (density > 0.0 && mean_lambda > 0.0) theta.w *= density / mean_lambda;
}

RestartOutcome run_restart(const DirectedGraph& g, const FitConfig& config,
                           const PairMask* held_out, std::size_t restart) {
  RestartOutcome outcome;
  FitResult& r = outcome.result;
  r.restart_index = restart;

  const std::uint64_t seed = derive_seed(config.rng_seed, restart);
  if (config.initial_theta) {
    r.theta = *config.initial_theta;
    r.theta.seed = seed;
  } else {
    r.theta = initial_parameters(g.n_nodes(), config, seed);
    if (config.scale_init) scale_to_density(r.theta, g);
  }
  if (config.variant == ModelVariant::regular_only) r.theta.mu = 0.0;
  r.state.q = PairValues(g.n_nodes(), 0.0);

  std::size_t eta_fallbacks = 0;
  std::size_t degenerate = 0;
  std::size_t decreases = 0;
  std::size_t streak = 0;
  auto record = [&](double objective) {
    if (!std::isfinite(objective)) return false;
    if (!r.objective_trace.empty()) {
      const double prev = r.objective_trace.back();
      if (objective < prev - (1e-8 + 1e-12 * std::abs(prev))) ++decreases;
      const double scale = std::abs(prev) > 0.0 ? std::abs(prev) : 1.0;
      streak = std::abs(objective - prev) / scale < config.convergence_tol ? streak + 1 : 0;
    }
    r.objective_trace.push_back(objective);
    return true;
  };

  for (std::size_t t = 1; t <= config.max_iter; ++t) {
    const UpdateFlags flags = em_iteration(r.theta, r.state, g, config, held_out);
    r.iterations_run = t;
    eta_fallbacks += flags.eta_fallback;
    degenerate += flags.zero_denominator + flags.pi_denominator_zero;
    if (t % config.check_every == 0 || t == config.max_iter) {
      if (!record(log_posterior(r.theta, g, r.state.q, held_out))) {
        outcome.failure = "non-finite objective at iteration " + std::to_string(t);
        return outcome;
      }
      if (streak >= 2) {
        r.converged = true;
        break;
      }
    }
  }

  // Leave Q and rho consistent with the returned parameters.
  r.state.k = r.theta.k();
  r.state.rho = e_step_rho(r.theta, g);
  if (config.variant == ModelVariant::full) r.state.q = e_step_q(r.theta, g, held_out);
  if (!record(log_posterior(r.theta, g, r.state.q, held_out))) {
    outcome.failure = "non-finite objective after final E-step";
    return outcome;
  }
  r.final_objective = r.objective_trace.back();

  if (decreases) {
    r.warnings.push_back("objective decreased at " + std::to_string(decreases) +
                         " check(s)");
  }
  if (eta_fallbacks) {
    r.warnings.push_back("eta fixed point fell back to root finding " +
                         std::to_string(eta_fallbacks) + " time(s)");
  }
  if (degenerate) {
    r.warnings.push_back(std::to_string(degenerate) +
                         " degenerate update(s) (zero denominator)");
  }
  outcome.ok = true;
  return outcome;
}

}  // namespace

FitResult fit(const DirectedGraph& g, const FitConfig& config, const PairMask* held_out) {
  config.validate();
  if (g.n_nodes() < 2) throw FitError("fit needs at least two nodes");
  if (g.n_nodes() > config.max_nodes && !config.allow_large) {
    throw FitError("graph has " + std::to_string(g.n_nodes()) +
                   " nodes; dense Q is refused above " +
                   std::to_string(config.max_nodes) + " without allow_large");
  }
  if (held_out && held_out->n_nodes() != g.n_nodes()) {
    throw FitError("held-out mask size differs from graph");
  }
  if (config.initial_theta && config.initial_theta->n_nodes() != g.n_nodes()) {
    throw FitError("initial_theta has a different node count");
  }

  std::vector<RestartOutcome> outcomes(config.n_restarts);
  parallel_for(config.n_restarts, config.threads, [&](std::size_t r) {
    outcomes[r] = run_restart(g, config, held_out, r);
  });

  std::optional<std::size_t> best;
  std::vector<double> objectives;
  std::vector<std::string> failures;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (!outcomes[r].ok) {
      objectives.push_back(std::numeric_limits<double>::quiet_NaN());
      failures.push_back("restart " + std::to_string(r) + ": " + outcomes[r].failure);
      continue;
    }
    objectives.push_back(outcomes[r].result.final_objective);
    if (!best || outcomes[r].result.final_objective >
                     outcomes[*best].result.final_objective) {
      best = r;
    }
  }
  if (!best) {
    std::ostringstream msg;
    msg << "all restarts failed";
    for (const auto& f : failures) msg << "; " << f;
    throw FitError(msg.str());
  }
  FitResult result = std::move(outcomes[*best].result);
  result.restart_objectives = std::move(objectives);
  for (auto& f : failures) result.warnings.push_back(std::move(f));
  return result;
}

}  // namespace crad
