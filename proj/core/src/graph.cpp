#include "crad/graph.hpp"

#include <algorithm>
#include <limits>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "crad/rng.hpp"

namespace crad {

namespace {

constexpr std::string_view kNodeDirective = "#@node";

bool is_separator(char c) {
  return c == ' ' || c == '\t' || c == ',' || c == '\r';
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && is_separator(line[pos])) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !is_separator(line[end])) ++end;
    if (end > pos) tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

void check_writable_id(const std::string& id) {
  if (id.empty() || id.front() == '#' || id.front() == '%' ||
      std::any_of(id.begin(), id.end(),
                  [](char c) { return is_separator(c) || c == '\n'; })) {
    throw GraphError("node id '" + id + "' cannot be written to an edge list");
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw GraphError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw GraphError("write to '" + path.string() + "' failed");
}

}  // namespace

DirectedGraph::DirectedGraph(std::size_t n_nodes, std::vector<Edge> edges,
                             std::vector<std::string> node_ids)
    : n_nodes_(n_nodes), edges_(std::move(edges)), ids_(std::move(node_ids)) {
  if (n_nodes_ > std::numeric_limits<NodeIndex>::max()) {
    throw GraphError("too many nodes");
  }
  for (const auto& [i, j] : edges_) {
    if (i >= n_nodes_ || j >= n_nodes_) {
      throw GraphError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") out of range for " + std::to_string(n_nodes_) +
                       " nodes");
    }
    if (i == j) throw GraphError("self-loop on node " + std::to_string(i));
  }
  std::sort(edges_.begin(), edges_.end());
  const auto unique_end = std::unique(edges_.begin(), edges_.end());
  duplicates_ = static_cast<std::size_t>(edges_.end() - unique_end);
  edges_.erase(unique_end, edges_.end());

  if (ids_.empty()) {
    ids_.reserve(n_nodes_);
    for (std::size_t i = 0; i < n_nodes_; ++i) ids_.push_back(std::to_string(i));
  } else if (ids_.size() != n_nodes_) {
    throw GraphError("node id count does not match node count");
  }
  id_lookup_.reserve(n_nodes_);
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    if (!id_lookup_.emplace(ids_[i], static_cast<NodeIndex>(i)).second) {
      throw GraphError("duplicate node id '" + ids_[i] + "'");
    }
  }

  out_offsets_.assign(n_nodes_ + 1, 0);
  in_offsets_.assign(n_nodes_ + 1, 0);
  for (const auto& [i, j] : edges_) {
    ++out_offsets_[i + 1];
    ++in_offsets_[j + 1];
  }
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    out_offsets_[i + 1] += out_offsets_[i];
    in_offsets_[i + 1] += in_offsets_[i];
  }
  out_targets_.resize(edges_.size());
  in_sources_.resize(edges_.size());
  std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [i, j] = edges_[e];
    out_targets_[e] = j;  // edges_ is sorted, so CSR order equals edge order
    in_sources_[in_fill[j]++] = i;
  }
}

std::size_t DirectedGraph::edge_position(NodeIndex i, NodeIndex j) const {
  const auto targets = out_neighbors(i);
  const auto it = std::lower_bound(targets.begin(), targets.end(), j);
  if (it == targets.end() || *it != j) return npos;
  return out_offsets_[i] + static_cast<std::size_t>(it - targets.begin());
}

NodeIndex DirectedGraph::index_of(const std::string& id) const {
  const auto it = id_lookup_.find(id);
  if (it == id_lookup_.end()) throw GraphError("unknown node id '" + id + "'");
  return it->second;
}

PairLabels::PairLabels(std::size_t n_nodes, std::vector<Edge> anomalous_pairs)
    : n_nodes_(n_nodes), pairs_(std::move(anomalous_pairs)) {
  for (auto& [i, j] : pairs_) {
    if (i >= n_nodes_ || j >= n_nodes_ || i == j) {
      throw GraphError("invalid labelled pair (" + std::to_string(i) + ", " +
                       std::to_string(j) + ")");
    }
    if (i > j) std::swap(i, j);
  }
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool PairLabels::contains(NodeIndex i, NodeIndex j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(pairs_.begin(), pairs_.end(), Edge{i, j});
}

std::vector<std::uint8_t> PairLabels::dense() const {
  std::vector<std::uint8_t> out(pair_count(n_nodes_), 0);
  for (const auto& [i, j] : pairs_) out[pair_index(n_nodes_, i, j)] = 1;
  return out;
}

LoadedGraph parse_edge_list(const std::string& text, const std::string& source) {
  std::unordered_map<std::string, NodeIndex> lookup;
  std::vector<std::string> ids;
  auto intern = [&](std::string_view token) {
    auto [it, inserted] =
        lookup.emplace(std::string(token), static_cast<NodeIndex>(ids.size()));
    if (inserted) ids.emplace_back(token);
    return it->second;
  };

  LoadStats stats;
  std::vector<Edge> edges;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (view.starts_with(kNodeDirective)) {
      const auto tokens = tokenize(view.substr(kNodeDirective.size()));
      if (tokens.size() != 1) {
        throw GraphError(source + ":" + std::to_string(line_no) +
                         ": node directive needs exactly one id");
      }
      intern(tokens.front());
      continue;
    }
    if (const auto hash = view.find_first_of("#%"); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    const auto tokens = tokenize(view);
    if (tokens.empty()) continue;
    if (tokens.size() < 2) {
      throw GraphError(source + ":" + std::to_string(line_no) +
                       ": expected source and target, got '" + line + "'");
    }
    ++stats.lines;
    const NodeIndex i = intern(tokens[0]);
    const NodeIndex j = intern(tokens[1]);
    if (i == j) {
      ++stats.self_loops_dropped;
      continue;
    }
    edges.emplace_back(i, j);
  }
  if (edges.empty()) throw GraphError(source + ": graph has no edges");

  const std::size_t n = ids.size();
  DirectedGraph graph(n, std::move(edges), std::move(ids));
  stats.duplicates_collapsed = graph.duplicates_collapsed();
  return {std::move(graph), stats};
}

LoadedGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_edge_list(buffer.str(), path.string());
}

void save_edge_list(const DirectedGraph& g, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "# directed edge list: " << g.n_nodes() << " nodes, " << g.n_edges()
      << " edges\n";
  for (const auto& id : g.node_ids()) {
    check_writable_id(id);
    out << kNodeDirective << ' ' << id << '\n';
  }
  for (const auto& [i, j] : g.edges()) {
    out << g.node_id(i) << ' ' << g.node_id(j) << '\n';
  }
  finish_write(out, path);
}

void save_labels(const PairLabels& labels, const DirectedGraph& g,
                 const std::filesystem::path& path) {
  if (labels.n_nodes() != g.n_nodes()) {
    throw GraphError("label matrix and graph disagree on node count");
  }
  auto out = open_for_write(path);
  out << "# anomalous unordered pairs: " << labels.size() << '\n';
  for (const auto& [i, j] : labels.pairs()) {
    out << g.node_id(i) << ' ' << g.node_id(j) << '\n';
  }
  finish_write(out, path);
}

PairLabels load_labels(const std::filesystem::path& path, const DirectedGraph& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot read '" + path.string() + "'");
  std::vector<Edge> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find_first_of("#%"); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    const auto tokens = tokenize(view);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw GraphError(path.string() + ":" + std::to_string(line_no) +
                       ": expected a node pair");
    }
    const NodeIndex i = g.index_of(std::string(tokens[0]));
    const NodeIndex j = g.index_of(std::string(tokens[1]));
    if (i == j) {
      throw GraphError(path.string() + ":" + std::to_string(line_no) +
                       ": pair repeats a node");
    }
    pairs.emplace_back(i, j);
  }
  return PairLabels(g.n_nodes(), std::move(pairs));
}

double reciprocity(const DirectedGraph& g) {
  if (g.n_edges() == 0) throw GraphError("reciprocity of a graph without edges");
  std::size_t reciprocated = 0;
  for (const auto& [i, j] : g.edges()) {
    if (g.has_edge(j, i)) ++reciprocated;
  }
  return static_cast<double>(reciprocated) / static_cast<double>(g.n_edges());
}

InjectionResult inject_anomalies(const DirectedGraph& g, std::size_t n_edges,
                                 std::uint64_t seed) {
  const std::size_t n = g.n_nodes();
  const std::size_t ordered = n * (n > 0 ? n - 1 : 0);
  const std::size_t absent = ordered - g.n_edges();
  if (n_edges > absent) {
    throw GraphError("cannot inject " + std::to_string(n_edges) +
                     " edges: only " + std::to_string(absent) +
                     " absent ordered pairs");
  }
  if (n_edges == 0) return {g, PairLabels(n, {})};

  Rng rng(seed);
  // Ordered pair (i, j), i != j, encoded as i * (n - 1) + (j < i ? j : j - 1).
  auto decode = [n](std::uint64_t code) {
    const auto i = static_cast<NodeIndex>(code / (n - 1));
    auto j = static_cast<NodeIndex>(code % (n - 1));
    if (j >= i) ++j;
    return Edge{i, j};
  };

  std::vector<Edge> added;
  added.reserve(n_edges);
  constexpr std::size_t kEnumerateLimit = std::size_t{1} << 22;
  if (absent <= kEnumerateLimit || 2 * n_edges > absent) {
    std::vector<Edge> candidates;
    candidates.reserve(absent);
    for (std::uint64_t code = 0; code < ordered; ++code) {
      const Edge e = decode(code);
      if (!g.has_edge(e.first, e.second)) candidates.push_back(e);
    }
    for (std::size_t k = 0; k < n_edges; ++k) {
      const std::size_t pick = k + rng.below(candidates.size() - k);
      std::swap(candidates[k], candidates[pick]);
      added.push_back(candidates[k]);
    }
  } else {
    std::unordered_set<std::uint64_t> taken;
    while (added.size() < n_edges) {
      const std::uint64_t code = rng.below(ordered);
      const Edge e = decode(code);
      if (g.has_edge(e.first, e.second) || !taken.insert(code).second) continue;
      added.push_back(e);
    }
  }

  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  edges.insert(edges.end(), added.begin(), added.end());
  return {DirectedGraph(n, std::move(edges), g.node_ids()),
          PairLabels(n, std::move(added))};
}

}  // namespace crad
