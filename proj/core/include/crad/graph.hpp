#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crad/pairs.hpp"

namespace crad {

using Edge = std::pair<NodeIndex, NodeIndex>;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary directed graph without self-loops. Immutable once built.
///
/// Out- and in-neighbourhoods are kept as sorted CSR arrays so A_ij and A_ji
/// are both answered by a binary search. Every node carries an external ID;
/// graphs built without one get their decimal index.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Builds from dense indices. Duplicate edges collapse to one; self-loops
  /// and out-of-range indices throw GraphError.
  DirectedGraph(std::size_t n_nodes, std::vector<Edge> edges,
                std::vector<std::string> node_ids = {});

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }

  /// Edges sorted by (source, target).
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const NodeIndex> out_neighbors(NodeIndex i) const {
    return {out_targets_.data() + out_offsets_[i],
            out_offsets_[i + 1] - out_offsets_[i]};
  }
  std::span<const NodeIndex> in_neighbors(NodeIndex i) const {
    return {in_sources_.data() + in_offsets_[i],
            in_offsets_[i + 1] - in_offsets_[i]};
  }
  /// Position of edge (i, j) in edges(), or npos.
  std::size_t edge_position(NodeIndex i, NodeIndex j) const;
  /// First position in edges() of node i's out-edges.
  std::size_t out_offset(NodeIndex i) const { return out_offsets_[i]; }

  bool has_edge(NodeIndex i, NodeIndex j) const {
    return edge_position(i, j) != npos;
  }

  const std::vector<std::string>& node_ids() const noexcept { return ids_; }
  const std::string& node_id(NodeIndex i) const { return ids_[i]; }
  /// Index of an external ID; throws GraphError when unknown.
  NodeIndex index_of(const std::string& id) const;

  /// Duplicate edges dropped while building.
  std::size_t duplicates_collapsed() const noexcept { return duplicates_; }

  double mean_degree() const noexcept {
    return n_nodes_ == 0 ? 0.0 : 2.0 * static_cast<double>(n_edges()) /
                                     static_cast<double>(n_nodes_);
  }

  bool operator==(const DirectedGraph& other) const {
    return n_nodes_ == other.n_nodes_ && edges_ == other.edges_;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t n_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<NodeIndex> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<NodeIndex> in_sources_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> id_lookup_;
  std::size_t duplicates_ = 0;
};

/// The symmetric anomaly-label matrix sigma, stored as the set of unordered
/// pairs {i, j} (i < j) labelled anomalous.
class PairLabels {
 public:
  PairLabels() = default;
  /// Pairs may come in either orientation; duplicates collapse.
  PairLabels(std::size_t n_nodes, std::vector<Edge> anomalous_pairs);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  std::span<const Edge> pairs() const noexcept { return pairs_; }
  bool contains(NodeIndex i, NodeIndex j) const;

  /// One 0/1 entry per unordered pair, in pair_index order.
  std::vector<std::uint8_t> dense() const;

  bool operator==(const PairLabels&) const = default;

 private:
  std::size_t n_nodes_ = 0;
  std::vector<Edge> pairs_;
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_collapsed = 0;
};

struct LoadedGraph {
  DirectedGraph graph;
  LoadStats stats;
};

/// Reads a whitespace- or comma-separated edge list. `#` starts a comment;
/// the directive `#@node <id>` declares a node (keeps isolated nodes and the
/// index order stable across a save/load round trip). IDs are arbitrary
/// tokens mapped to dense indices in order of first appearance.
LoadedGraph load_edge_list(const std::filesystem::path& path);
/// Same as load_edge_list on an in-memory document. `source` names it in
/// error messages.
LoadedGraph parse_edge_list(const std::string& text,
                            const std::string& source = "<memory>");

void save_edge_list(const DirectedGraph& g, const std::filesystem::path& path);

/// Label file: one "id_i id_j" line per anomalous unordered pair, IDs
/// resolved against `g`.
void save_labels(const PairLabels& labels, const DirectedGraph& g,
                 const std::filesystem::path& path);
PairLabels load_labels(const std::filesystem::path& path,
                       const DirectedGraph& g);

/// Fraction of edges whose reverse edge is also present.
double reciprocity(const DirectedGraph& g);

struct InjectionResult {
  DirectedGraph graph;
  PairLabels labels;
};

/// Adds `n_edges` directed edges drawn uniformly without replacement from the
/// absent ordered pairs and labels every touched unordered pair anomalous.
InjectionResult inject_anomalies(const DirectedGraph& g, std::size_t n_edges,
                                 std::uint64_t seed);

}  // namespace crad
