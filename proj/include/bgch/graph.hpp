#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bgch/matrix.hpp"

namespace bgch {

using NodeId = std::uint32_t;

// Bipartite graph over two disjoint node sets. V2 node v lives at unified
// index n1+v in the CSR adjacency and everywhere downstream, including the
// persistence format.
struct BipartiteGraph {
  std::size_t n1{0};
  std::size_t n2{0};
  std::vector<std::pair<NodeId, NodeId>> edges;  // (u in V1, v in V2), deduped
  std::size_t duplicates_dropped{0};

  // symmetric CSR over [0, n1+n2)
  std::vector<std::size_t> row_ptr;
  std::vector<NodeId> col_idx;

  std::size_t num_nodes() const { return n1 + n2; }
  std::size_t degree(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }

  // Builds the CSR from `edges`; called by the loaders/generators.
  void build_csr();
};

// Symmetrically normalized adjacency D^{-1/2} A D^{-1/2} in CSR form.
// Rows of isolated nodes are empty. Immutable after construction and safe
// to share across threads.
struct NormalizedOperator {
  std::size_t n{0};
  std::vector<std::size_t> row_ptr;
  std::vector<NodeId> col_idx;
  std::vector<float> values;
  std::vector<std::uint32_t> degrees;
};

BipartiteGraph load_edge_list(const std::string& path);
BipartiteGraph graph_from_edges(std::size_t n1, std::size_t n2,
                                std::vector<std::pair<NodeId, NodeId>> edges);

NormalizedOperator normalize(const BipartiteGraph& graph);

// out = A_hat * V. Row-parallel; per-row accumulation is independent so the
// result is bit-identical to the serial version.
void propagate(const NormalizedOperator& op, const Matrix& V, Matrix& out);
void propagate_serial(const NormalizedOperator& op, const Matrix& V,
                      Matrix& out);

Matrix propagate(const NormalizedOperator& op, const Matrix& V);

}  // namespace bgch
