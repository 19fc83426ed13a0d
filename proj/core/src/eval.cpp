#include "crad/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "crad/assignment.hpp"
#include "crad/parallel.hpp"
#include "crad/rng.hpp"

namespace crad {

namespace {

std::string to_text(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

double row_cosine(const Matrix& a, const Matrix& b, Eigen::Index r,
                  const std::vector<std::size_t>& perm) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double x = a(r, c);
    const double y = b(r, static_cast<Eigen::Index>(perm[c]));
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

double mean_row_cosine(const Matrix& a, const Matrix& b,
                       const std::vector<std::size_t>& perm) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) total += row_cosine(a, b, r, perm);
  return a.rows() ? total / static_cast<double>(a.rows()) : 0.0;
}

Matrix column_cosines(const Matrix& truth, const Matrix& fitted) {
  const Eigen::Index k = truth.cols();
  Matrix s(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const double na = truth.col(a).norm();
    for (Eigen::Index b = 0; b < k; ++b) {
      const double nb = fitted.col(b).norm();
      s(a, b) = na > 0.0 && nb > 0.0 ? truth.col(a).dot(fitted.col(b)) / (na * nb) : 0.0;
    }
  }
  return s;
}

}  // namespace

std::pair<double, double> mean_sd(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

PairMask FoldMask::held_out(std::size_t f) const {
  PairMask mask(n_nodes, 0);
  for (std::size_t p = 0; p < fold.size(); ++p) mask.at_index(p) = fold[p] == f;
  return mask;
}

std::size_t FoldMask::fold_size(std::size_t f) const {
  return static_cast<std::size_t>(std::count(fold.begin(), fold.end(), f));
}

FoldMask make_folds(std::size_t n_nodes, std::size_t fold_count, std::uint64_t seed) {
  if (fold_count < 2) throw EvalError("need at least two folds");
  const std::size_t pairs = pair_count(n_nodes);
  if (pairs < fold_count) throw EvalError("fewer node pairs than folds");
  std::vector<std::size_t> order(pairs);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = pairs; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  FoldMask m;
  m.n_nodes = n_nodes;
  m.fold_count = fold_count;
  m.fold.resize(pairs);
  for (std::size_t pos = 0; pos < pairs; ++pos) {
    m.fold[order[pos]] = static_cast<std::uint32_t>(pos % fold_count);
  }
  return m;
}

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw EvalError("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && scores[order[end]] == scores[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + 1 + end);  // mean of start+1..end
    for (std::size_t t = start; t < end; ++t) {
      if (labels[order[t]]) {
        positive_rank_sum += rank;
        ++positives;
      }
    }
    start = end;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw EvalError("AUC needs both classes");
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

EvaluationReport anomaly_auc(const PairValues& q, const PairLabels& labels) {
  if (q.n_nodes() != labels.n_nodes()) throw EvalError("Q and labels sizes differ");
  EvaluationReport r;
  r.metric = "anomaly_auc";
  r.n_items = q.size();
  const auto dense = labels.dense();
  r.value = auc(q.values(), dense);
  return r;
}

EvaluationReport precision_at_budget(const PairValues& q, const PairLabels& labels,
                                     std::size_t budget) {
  if (q.n_nodes() != labels.n_nodes()) throw EvalError("Q and labels sizes differ");
  if (budget > q.size()) throw EvalError("budget exceeds the number of pairs");
  EvaluationReport r;
  r.metric = "precision_at_budget";
  r.n_items = budget;
  r.config.emplace_back("budget", std::to_string(budget));
  if (budget == 0) {
    r.empty = true;
    r.notes.push_back("budget is zero");
    return r;
  }
  std::vector<std::size_t> order(q.size());
  std::iota(order.begin(), order.end(), 0);
  // Pair index order is lexicographic (i, j) order.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      const double qa = q.at_index(a), qb = q.at_index(b);
                      return qa != qb ? qa > qb : a < b;
                    });
  const auto dense = labels.dense();
  std::size_t hits = 0;
  for (std::size_t t = 0; t < budget; ++t) hits += dense[order[t]];
  r.value = static_cast<double>(hits) / static_cast<double>(budget);
  if (budget == labels.size()) r.notes.push_back("budget equals the anomaly count: precision = recall");
  return r;
}

std::vector<std::size_t> align_communities(const Matrix& truth, const Matrix& fitted) {
  if (truth.rows() != fitted.rows() || truth.cols() != fitted.cols()) {
    throw EvalError("membership matrices differ in shape");
  }
  return max_weight_assignment(column_cosines(truth, fitted));
}

EvaluationReport cosine_similarity(const Matrix& truth, const Matrix& fitted) {
  const auto perm = align_communities(truth, fitted);
  EvaluationReport r;
  r.metric = "cosine_similarity";
  r.n_items = static_cast<std::size_t>(truth.rows());
  r.value = mean_row_cosine(truth, fitted, perm);
  return r;
}

EvaluationReport cosine_similarity(const LatentParameters& truth,
                                   const LatentParameters& fitted) {
  if (truth.u.rows() != fitted.u.rows() || truth.u.cols() != fitted.u.cols() ||
      truth.v.rows() != fitted.v.rows() || truth.v.cols() != fitted.v.cols()) {
    throw EvalError("membership matrices differ in shape");
  }
  // lambda = u w v^T is unchanged by separate column permutations of u and v
  // (with w permuted to match), so each is aligned on its own.
  const auto perm_u = align_communities(truth.u, fitted.u);
  const auto perm_v = align_communities(truth.v, fitted.v);
  EvaluationReport r;
  r.metric = "cosine_similarity";
  r.n_items = static_cast<std::size_t>(truth.u.rows());
  const double cu = mean_row_cosine(truth.u, fitted.u, perm_u);
  const double cv = mean_row_cosine(truth.v, fitted.v, perm_v);
  r.value = 0.5 * (cu + cv);
  r.config.emplace_back("u", to_text(cu));
  r.config.emplace_back("v", to_text(cv));
  return r;
}

EvaluationReport cv_link_prediction(const DirectedGraph& g, const FitConfig& config,
                                    const FoldMask& folds, std::uint64_t seed) {
  if (folds.n_nodes != g.n_nodes() || folds.fold.size() != pair_count(g.n_nodes())) {
    throw EvalError("fold assignment does not match the graph");
  }
  const std::size_t n = g.n_nodes();
  std::vector<std::optional<double>> values(folds.fold_count);
  std::vector<std::string> skipped(folds.fold_count);

  FitConfig inner = config;
  inner.threads = 1;
  parallel_for(folds.fold_count, config.threads, [&](std::size_t f) {
    const PairMask mask = folds.held_out(f);
    FitConfig c = inner;
    c.rng_seed = derive_seed(seed, f);
    const FitResult result = fit(g, c, &mask);
    const LatentParameters& theta = result.theta;

    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    for (std::size_t p = 0; p < mask.size(); ++p) {
      if (!mask.at_index(p)) continue;
      const auto [i, j] = pair_from_index(n, p);
      scores.push_back(expected_edge(theta, theta.mu, i, j));
      labels.push_back(g.has_edge(i, j));
      scores.push_back(expected_edge(theta, theta.mu, j, i));
      labels.push_back(g.has_edge(j, i));
    }
    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (!has_pos || !has_neg) {
      skipped[f] = "fold " + std::to_string(f) + " skipped: single class";
      return;
    }
    values[f] = auc(scores, labels);
  });

  EvaluationReport r;
  r.metric = "cv_link_auc";
  r.n_items = 2 * folds.fold.size();
  r.config.emplace_back("folds", std::to_string(folds.fold_count));
  r.config.emplace_back("seed", std::to_string(seed));
  r.config.emplace_back("k", std::to_string(config.k));
  for (std::size_t f = 0; f < folds.fold_count; ++f) {
    if (values[f]) r.fold_values.push_back(*values[f]);
    if (!skipped[f].empty()) r.notes.push_back(skipped[f]);
  }
  if (r.fold_values.empty()) {
    r.empty = true;
    return r;
  }
  std::tie(r.value, r.sd) = mean_sd(r.fold_values);
  return r;
}

std::vector<EvaluationReport> inject_and_score(const DirectedGraph& g,
                                               const std::vector<double>& densities,
                                               const std::vector<std::uint64_t>& seeds,
                                               const FitConfig& config) {
  if (seeds.empty()) throw EvalError("need at least one seed");
  std::vector<EvaluationReport> reports;
  FitConfig inner = config;
  inner.threads = 1;
  for (double density : densities) {
    if (!(density >= 0.0)) throw EvalError("injection density must be nonnegative");
    const auto n_inject =
        static_cast<std::size_t>(std::llround(density * static_cast<double>(g.n_edges())));
    EvaluationReport r;
    r.metric = "injected_precision";
    r.config.emplace_back("density", to_text(density));
    r.config.emplace_back("injected_edges", std::to_string(n_inject));
    r.config.emplace_back("seeds", std::to_string(seeds.size()));
    if (n_inject == 0) {
      r.empty = true;
      r.notes.push_back("no edges injected at this density");
      reports.push_back(std::move(r));
      continue;
    }
    std::vector<double> precision(seeds.size());
    std::vector<std::size_t> budgets(seeds.size());
    parallel_for(seeds.size(), config.threads, [&](std::size_t s) {
      const InjectionResult injected = inject_anomalies(g, n_inject, seeds[s]);
      FitConfig c = inner;
      c.rng_seed = seeds[s];
      const FitResult result = fit(injected.graph, c);
      budgets[s] = injected.labels.size();
      precision[s] = precision_at_budget(result.state.q, injected.labels, budgets[s]).value;
    });
    r.fold_values = precision;
    r.n_items = std::accumulate(budgets.begin(), budgets.end(), std::size_t{0});
    std::tie(r.value, r.sd) = mean_sd(precision);
    r.notes.push_back("budget per seed equals the number of labelled pairs (precision = recall)");
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace crad
