#include "bgch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bgch {

void BipartiteGraph::build_csr() {
  const std::size_t n = n1 + n2;
  row_ptr.assign(n + 1, 0);
  for (const auto& [u, v] : edges) {
    row_ptr[u + 1]++;
    row_ptr[n1 + v + 1]++;
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  col_idx.assign(row_ptr[n], 0);
  std::vector<std::size_t> cursor(row_ptr.begin(), row_ptr.end() - 1);
  for (const auto& [u, v] : edges) {
    col_idx[cursor[u]++] = static_cast<NodeId>(n1 + v);
    col_idx[cursor[n1 + v]++] = u;
  }
  for (std::size_t i = 0; i < n; ++i)
    std::sort(col_idx.begin() + row_ptr[i], col_idx.begin() + row_ptr[i + 1]);
}

BipartiteGraph graph_from_edges(std::size_t n1, std::size_t n2,
                                std::vector<std::pair<NodeId, NodeId>> edges) {
  BipartiteGraph g;
  g.n1 = n1;
  g.n2 = n2;
  std::sort(edges.begin(), edges.end());
  std::size_t before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.duplicates_dropped = before - edges.size();
  for (const auto& [u, v] : edges) {
    if (u >= n1 || v >= n2)
      throw std::runtime_error("edge index out of bounds");
  }
  g.edges = std::move(edges);
  g.build_csr();
  return g;
}

BipartiteGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);

  std::size_t header_n1 = 0, header_n2 = 0;
  bool have_header = false;
  std::vector<std::pair<NodeId, NodeId>> edges;
  NodeId max_u = 0, max_v = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string k1, k2;
      std::size_t a = 0, b = 0;
      if (hs >> k1 >> a >> k2 >> b && k1 == "n1" && k2 == "n2") {
        header_n1 = a;
        header_n2 = b;
        have_header = true;
      }
      continue;  // other '#' lines are comments
    }
    std::istringstream ls(line);
    long long u = -1, v = -1;
    if (!(ls >> u >> v) || u < 0 || v < 0) {
      throw std::runtime_error("parse failure at line " +
                               std::to_string(lineno) + " of " + path);
    }
    std::string extra;
    if (ls >> extra) {
      throw std::runtime_error("unexpected trailing token (weighted edges "
                               "are not supported) at line " +
                               std::to_string(lineno) + " of " + path);
    }
    if (have_header &&
        (static_cast<std::size_t>(u) >= header_n1 ||
         static_cast<std::size_t>(v) >= header_n2)) {
      throw std::runtime_error("index out of bounds at line " +
                               std::to_string(lineno) + " of " + path);
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    max_u = std::max(max_u, static_cast<NodeId>(u));
    max_v = std::max(max_v, static_cast<NodeId>(v));
  }
  if (edges.empty()) throw std::runtime_error("empty edge set: " + path);

  std::size_t n1 = have_header ? header_n1 : max_u + 1;
  std::size_t n2 = have_header ? header_n2 : max_v + 1;
  return graph_from_edges(n1, n2, std::move(edges));
}

NormalizedOperator normalize(const BipartiteGraph& graph) {
  NormalizedOperator op;
  op.n = graph.num_nodes();
  op.row_ptr = graph.row_ptr;
  op.col_idx = graph.col_idx;
  op.degrees.resize(op.n);
  for (std::size_t i = 0; i < op.n; ++i)
    op.degrees[i] = static_cast<std::uint32_t>(graph.degree(i));
  op.values.resize(op.col_idx.size());
  for (std::size_t i = 0; i < op.n; ++i) {
    for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      NodeId j = op.col_idx[k];
      op.values[k] = static_cast<float>(
          1.0 / std::sqrt(static_cast<double>(op.degrees[i]) *
                          static_cast<double>(op.degrees[j])));
    }
  }
  return op;
}

namespace {

inline void propagate_row(const NormalizedOperator& op, const Matrix& V,
                          Matrix& out, std::size_t i) {
  float* dst = out.row(i);
  std::fill(dst, dst + out.cols, 0.0f);
  for (std::size_t k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
    const float w = op.values[k];
    const float* src = V.row(op.col_idx[k]);
    for (std::size_t c = 0; c < V.cols; ++c) dst[c] += w * src[c];
  }
}

}  // namespace

void propagate(const NormalizedOperator& op, const Matrix& V, Matrix& out) {
  if (V.rows != op.n) throw std::runtime_error("propagate: dimension mismatch");
  out.rows = op.n;
  out.cols = V.cols;
  out.data.resize(op.n * V.cols);
  const std::int64_t n = static_cast<std::int64_t>(op.n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    propagate_row(op, V, out, static_cast<std::size_t>(i));
}

void propagate_serial(const NormalizedOperator& op, const Matrix& V,
                      Matrix& out) {
  if (V.rows != op.n) throw std::runtime_error("propagate: dimension mismatch");
  out.rows = op.n;
  out.cols = V.cols;
  out.data.resize(op.n * V.cols);
  for (std::size_t i = 0; i < op.n; ++i) propagate_row(op, V, out, i);
}

Matrix propagate(const NormalizedOperator& op, const Matrix& V) {
  Matrix out;
  propagate(op, V, out);
  return out;
}

}  // namespace bgch
