#include "crad/theta_io.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace crad {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, std::size_t n_rows, std::size_t n_cols,
                        const char* name) {
  if (!rows.is_array() || rows.size() != n_rows) {
    throw ModelError(std::string("theta document: '") + name + "' has wrong row count");
  }
  Matrix m(n_rows, n_cols);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || row.size() != n_cols) {
      throw ModelError(std::string("theta document: '") + name +
                       "' has wrong column count");
    }
    for (std::size_t c = 0; c < n_cols; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string theta_to_json(const LatentParameters& theta,
                          const std::vector<std::string>& node_ids) {
  json doc;
  doc["format"] = "crad-theta";
  doc["version"] = 1;
  doc["n_nodes"] = theta.n_nodes();
  doc["k"] = theta.k();
  doc["u"] = matrix_to_json(theta.u);
  doc["v"] = matrix_to_json(theta.v);
  doc["w"] = matrix_to_json(theta.w);
  doc["eta"] = theta.eta;
  doc["pi"] = theta.pi;
  doc["mu"] = theta.mu;
  doc["seed"] = theta.seed;
  if (!node_ids.empty()) doc["node_ids"] = node_ids;
  return doc.dump(1) + "\n";
}

ThetaDocument theta_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("theta document: ") + e.what());
  }
  if (doc.value("format", "") != "crad-theta") {
    throw ModelError("theta document: missing or unknown format tag");
  }
  try {
    const auto n = doc.at("n_nodes").get<std::size_t>();
    const auto k = doc.at("k").get<std::size_t>();
    ThetaDocument out;
    out.theta.u = matrix_from_json(doc.at("u"), n, k, "u");
    out.theta.v = matrix_from_json(doc.at("v"), n, k, "v");
    out.theta.w = matrix_from_json(doc.at("w"), k, k, "w");
    out.theta.eta = doc.at("eta").get<double>();
    out.theta.pi = doc.at("pi").get<double>();
    out.theta.mu = doc.at("mu").get<double>();
    out.theta.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("node_ids")) {
      out.node_ids = doc["node_ids"].get<std::vector<std::string>>();
      if (out.node_ids.size() != n) {
        throw ModelError("theta document: node_ids length differs from n_nodes");
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw ModelError(std::string("theta document: ") + e.what());
  }
}

void save_theta(const LatentParameters& theta, const std::filesystem::path& path,
                const std::vector<std::string>& node_ids) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot open '" + path.string() + "' for writing");
  out << theta_to_json(theta, node_ids);
  if (!out.flush()) throw ModelError("write to '" + path.string() + "' failed");
}

ThetaDocument load_theta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return theta_from_json(buffer.str());
}

void save_q(const PairValues& q, const DirectedGraph& g,
            const std::filesystem::path& path) {
  if (q.n_nodes() != g.n_nodes()) throw ModelError("Q and graph sizes differ");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot open '" + path.string() + "' for writing");
  const std::size_t n = g.n_nodes();
  std::size_t p = 0;
  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = i + 1; j < n; ++j, ++p) {
      out << g.node_id(i) << ' ' << g.node_id(j) << ' '
          << format_double(q.at_index(p)) << '\n';
    }
  }
  if (!out.flush()) throw ModelError("write to '" + path.string() + "' failed");
}

PairValues load_q(const std::filesystem::path& path, const DirectedGraph& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot read '" + path.string() + "'");
  PairValues q(g.n_nodes(), 0.0);
  PairMask seen(g.n_nodes(), 0);
  std::string a, b, value;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    if (!(fields >> a >> b >> value)) {
      throw ModelError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 'i j q'");
    }
    const NodeIndex i = g.index_of(a);
    const NodeIndex j = g.index_of(b);
    double x = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), x);
    if (res.ec != std::errc() || i == j || !(x >= 0.0 && x <= 1.0)) {
      throw ModelError(path.string() + ":" + std::to_string(line_no) +
                       ": invalid entry");
    }
    q(i, j) = x;
    seen(i, j) = 1;
  }
  for (std::size_t p = 0; p < seen.size(); ++p) {
    if (!seen.at_index(p)) {
      const auto [i, j] = pair_from_index(g.n_nodes(), p);
      throw ModelError(path.string() + ": missing pair (" + g.node_id(i) + ", " +
                       g.node_id(j) + ")");
    }
  }
  return q;
}

}  // namespace crad
