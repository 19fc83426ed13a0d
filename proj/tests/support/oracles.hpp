#pragma once

// Independent, deliberately naive transcriptions of the model used as test
// oracles. Nothing here calls into the library's model code.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "crad/graph.hpp"
#include "crad/model.hpp"

namespace crad::oracle {

using Dense = std::vector<std::vector<int>>;

inline Dense dense_adjacency(const DirectedGraph& g) {
  Dense a(g.n_nodes(), std::vector<int>(g.n_nodes(), 0));
  for (const auto& [i, j] : g.edges()) a[i][j] = 1;
  return a;
}

inline double brute_lambda(const LatentParameters& t, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < t.u.cols(); ++k)
    for (Eigen::Index q = 0; q < t.v.cols(); ++q)
      s += t.u(i, k) * t.v(j, q) * t.w(k, q);
  return s;
}

/// Unnormalised weights of (A_ij, A_ji) = 00, 01, 10, 11 under each label.
inline std::array<double, 4> regular_weights(double lij, double lji, double eta) {
  return {1.0, lji, lij, eta * lij * lji};
}
inline std::array<double, 4> anomalous_weights(double pi) {
  return {1.0, pi, pi, pi * pi};
}
inline std::array<double, 4> normalise(std::array<double, 4> w) {
  const double z = w[0] + w[1] + w[2] + w[3];
  for (double& x : w) x /= z;
  return w;
}
inline int outcome(int a_ij, int a_ji) { return 2 * a_ij + a_ji; }

/// P(sigma = 1 | A_ij, A_ji) by Bayes' rule over the two enumerated tables.
inline double bayes_q(double lij, double lji, double eta, double pi, double mu,
                      int a_ij, int a_ji) {
  const auto r = normalise(regular_weights(lij, lji, eta));
  const auto a = normalise(anomalous_weights(pi));
  const int o = outcome(a_ij, a_ji);
  const double ta = mu * a[o];
  const double tr = (1.0 - mu) * r[o];
  return ta / (ta + tr);
}

/// Probability that A_ij = 1 under the q-mixture, by summing outcomes 10, 11.
inline double enumerated_expected_edge(double lij, double lji, double eta, double pi,
                                       double q) {
  const auto r = normalise(regular_weights(lij, lji, eta));
  const auto a = normalise(anomalous_weights(pi));
  return (1.0 - q) * (r[2] + r[3]) + q * (a[2] + a[3]);
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Term-by-term transcription of the variational bound. `include(i, j)`
/// selects the unordered pairs (i < j) that take part.
inline double literal_bound(const LatentParameters& t, const Dense& a,
                            const std::function<double(std::size_t, std::size_t)>& q,
                            const std::function<bool(std::size_t, std::size_t)>& include =
                                [](std::size_t, std::size_t) { return true; }) {
  const double eps = 1e-12;
  auto fl = [&](double x) { return std::log(std::max(x, eps)); };
  double total = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!include(i, j)) continue;
      const double qq = q(i, j);
      const double lij = brute_lambda(t, i, j);
      const double lji = brute_lambda(t, j, i);
      const int aij = a[i][j], aji = a[j][i];
      double reg = -std::log(lij + lji + t.eta * lij * lji + 1.0);
      if (aij) reg += fl(lij);
      if (aji) reg += fl(lji);
      if (aij && aji) reg += fl(t.eta);
      const double ano = (aij + aji) * fl(t.pi) - 2.0 * std::log(1.0 + t.pi);
      total += -xlogx(qq) - xlogx(1.0 - qq);
      total += (1.0 - qq) * reg + qq * ano;
      if (qq > 0.0) total += qq * fl(t.mu);
      if (qq < 1.0) total += (1.0 - qq) * fl(1.0 - t.mu);
    }
  }
  return total;
}

inline LatentParameters random_theta(std::size_t n, std::size_t k, std::mt19937_64& rng,
                                     double scale = 1.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LatentParameters t;
  t.u.resize(n, k);
  t.v.resize(n, k);
  t.w.resize(k, k);
  for (auto* m : {&t.u, &t.v, &t.w})
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = 0; c < m->cols(); ++c) (*m)(r, c) = scale * unit(rng);
  t.eta = 0.2 + 5.0 * unit(rng);
  t.pi = 0.05 + 2.0 * unit(rng);
  t.mu = 0.02 + 0.9 * unit(rng);
  return t;
}

inline DirectedGraph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = 0; j < n; ++j)
      if (i != j && coin(rng)) edges.emplace_back(i, j);
  return DirectedGraph(n, std::move(edges));
}

}  // namespace crad::oracle
