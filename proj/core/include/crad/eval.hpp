#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crad/graph.hpp"
#include "crad/inference.hpp"
#include "crad/model.hpp"

namespace crad {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvaluationReport {
  std::string metric;
  double value = 0.0;
  std::size_t n_items = 0;
  /// Per-fold (or per-seed) values; `value` is their mean when present.
  std::vector<double> fold_values;
  double sd = 0.0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> notes;
  /// Nothing to score (zero budget, every fold single-class, ...).
  bool empty = false;
};

/// Assignment of every unordered pair to one of `fold_count` folds.
struct FoldMask {
  std::size_t n_nodes = 0;
  std::size_t fold_count = 0;
  /// fold[pair_index] in [0, fold_count).
  std::vector<std::uint32_t> fold;

  PairMask held_out(std::size_t f) const;
  std::size_t fold_size(std::size_t f) const;
};

/// Shuffles pairs with the seed and deals them round-robin, so fold sizes
/// differ by at most one.
FoldMask make_folds(std::size_t n_nodes, std::size_t fold_count, std::uint64_t seed);

/// Rank AUC with average ranks for ties. Throws EvalError unless both
/// classes are present.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// AUC of Q over all unordered pairs against the planted labels.
EvaluationReport anomaly_auc(const PairValues& q, const PairLabels& labels);

/// Precision of the `budget` highest-Q pairs. Ties in Q are broken by
/// ascending (i, j).
EvaluationReport precision_at_budget(const PairValues& q, const PairLabels& labels,
                                     std::size_t budget);

/// Column permutation of `fitted` best matching `truth` by summed column
/// cosine; perm[c] is the fitted column aligned to true column c.
std::vector<std::size_t> align_communities(const Matrix& truth, const Matrix& fitted);

/// Mean per-node cosine between rows after aligning columns (zero rows
/// score 0).
EvaluationReport cosine_similarity(const Matrix& truth, const Matrix& fitted);

/// u and v each aligned with their own permutation (the model is invariant
/// to permuting them independently); value is the mean of the two scores.
EvaluationReport cosine_similarity(const LatentParameters& truth,
                                   const LatentParameters& fitted);

/// Fits once per fold with that fold's pairs held out and scores both
/// directed entries of each held-out pair with expected_edge at Q = mu.
/// Folds run on up to config.threads workers.
EvaluationReport cv_link_prediction(const DirectedGraph& g, const FitConfig& config,
                                    const FoldMask& folds, std::uint64_t seed);

/// For each density, injects round(density * E) edges per seed, fits, and
/// scores precision at a budget equal to the number of labelled pairs.
std::vector<EvaluationReport> inject_and_score(const DirectedGraph& g,
                                               const std::vector<double>& densities,
                                               const std::vector<std::uint64_t>& seeds,
                                               const FitConfig& config);

/// Mean and sample standard deviation.
std::pair<double, double> mean_sd(std::span<const double> values);

}  // namespace crad
