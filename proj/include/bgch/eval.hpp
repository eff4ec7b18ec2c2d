#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bgch/graph.hpp"
#include "bgch/hamming_index.hpp"

namespace bgch {

struct EvalReport {
  std::map<std::size_t, double> recall_at;
  std::map<std::size_t, double> ndcg_at;
  std::size_t queries_evaluated{0};
  std::size_t queries_skipped{0};  // empty ground truth
  // storage accounting for the serialized table
  std::size_t code_bits{0};
  std::size_t float32_bits{0};
  double ratio{0.0};
};

struct SplitResult {
  BipartiteGraph train;
  std::vector<std::pair<NodeId, NodeId>> test_edges;
};

// Per-V1-node random holdout at the given ratio; nodes with a single edge
// keep it in train. Deterministic in the seed.
SplitResult split(const BipartiteGraph& graph, double ratio,
                  std::uint64_t seed);

// results[x] = ranked V2 ids for query x (train edges already excluded);
// truth[x] = held-out V2 ids. Binary relevance, log2 discount, per-query
// macro average over queries with non-empty truth.
EvalReport recall_ndcg(const std::vector<std::vector<NodeId>>& results,
                       const std::vector<std::vector<NodeId>>& truth,
                       const std::vector<std::size_t>& n_list);

struct CompressionReport {
  double paper_ratio;  // 32d / (d + 32(L+1)), d read as total code width
  double layout_ratio; // per-layer storage: 32 d (L+1) / (d(L+1) + 32(L+1))
};

CompressionReport compression_report(std::size_t d, int layers);

// Block-structured random bipartite graph: V1 block i connects to V2 block i
// with probability p_in, cross-block with p_out.
BipartiteGraph planted_graph(std::size_t blocks, std::size_t nodes_per_block,
                             double p_in, double p_out, std::uint64_t seed);

std::string to_json(const EvalReport& report);
std::string to_tsv(const EvalReport& report);

}  // namespace bgch
