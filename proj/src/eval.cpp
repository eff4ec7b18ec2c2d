#include "bgch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "bgch/rng.hpp"

namespace bgch {

SplitResult split(const BipartiteGraph& graph, double ratio,
                  std::uint64_t seed) {
  if (ratio <= 0.0 || ratio >= 1.0)
    throw std::runtime_error("split: ratio must lie in (0,1)");

  std::vector<std::vector<NodeId>> by_user(graph.n1);
  for (const auto& [u, v] : graph.edges) by_user[u].push_back(v);

  SplitResult out;
  std::vector<std::pair<NodeId, NodeId>> train_edges;
  for (std::size_t u = 0; u < graph.n1; ++u) {
    auto& items = by_user[u];
    if (items.size() <= 1) {
      for (NodeId v : items) train_edges.emplace_back(static_cast<NodeId>(u), v);
      continue;
    }
    SplitMix64 rng(SplitMix64::mix(seed, u));
    // Fisher-Yates, then hold out a prefix
    for (std::size_t i = items.size(); i > 1; --i)
      std::swap(items[i - 1], items[rng.next_u64() % i]);
    std::size_t n_test = static_cast<std::size_t>(
        std::floor(ratio * static_cast<double>(items.size())));
    n_test = std::min(n_test, items.size() - 1);
    n_test = std::max<std::size_t>(n_test, 1);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i < n_test)
        out.test_edges.emplace_back(static_cast<NodeId>(u), items[i]);
      else
        train_edges.emplace_back(static_cast<NodeId>(u), items[i]);
    }
  }
  out.train = graph_from_edges(graph.n1, graph.n2, std::move(train_edges));
  return out;
}

EvalReport recall_ndcg(const std::vector<std::vector<NodeId>>& results,
                       const std::vector<std::vector<NodeId>>& truth,
                       const std::vector<std::size_t>& n_list) {
  if (results.size() != truth.size())
    throw std::runtime_error("recall_ndcg: result/truth size mismatch");
  EvalReport report;
  std::map<std::size_t, double> recall_sum, ndcg_sum;
  for (std::size_t n : n_list) {
    recall_sum[n] = 0.0;
    ndcg_sum[n] = 0.0;
  }
  for (std::size_t q = 0; q < results.size(); ++q) {
    if (truth[q].empty()) {
      report.queries_skipped++;
      continue;
    }
    report.queries_evaluated++;
    std::unordered_set<NodeId> gt(truth[q].begin(), truth[q].end());
    for (std::size_t n : n_list) {
      const std::size_t depth = std::min(n, results[q].size());
      std::size_t hits = 0;
      double dcg = 0.0;
      for (std::size_t r = 0; r < depth; ++r) {
        if (gt.count(results[q][r])) {
          ++hits;
          dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
        }
      }
      double idcg = 0.0;
      const std::size_t ideal = std::min(n, gt.size());
      for (std::size_t r = 0; r < ideal; ++r)
        idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
      recall_sum[n] += static_cast<double>(hits) / gt.size();
      ndcg_sum[n] += idcg > 0.0 ? dcg / idcg : 0.0;
    }
  }
  if (report.queries_evaluated == 0)
    throw std::runtime_error("recall_ndcg: no query has ground truth");
  for (std::size_t n : n_list) {
    report.recall_at[n] = recall_sum[n] / report.queries_evaluated;
    report.ndcg_at[n] = ndcg_sum[n] / report.queries_evaluated;
  }
  return report;
}

CompressionReport compression_report(std::size_t d, int layers) {
  if (d == 0 || layers < 0)
    throw std::runtime_error("compression_report: bad arguments");
  CompressionReport r{};
  const double fd = static_cast<double>(d);
  const double fl = 32.0 * (layers + 1);
  r.paper_ratio = 32.0 * fd / (fd + fl);
  r.layout_ratio = 32.0 * fd * (layers + 1) / (fd * (layers + 1) + fl);
  return r;
}

BipartiteGraph planted_graph(std::size_t blocks, std::size_t nodes_per_block,
                             double p_in, double p_out, std::uint64_t seed) {
  if (p_in <= p_out)
    throw std::runtime_error("planted_graph: requires p_in > p_out");
  std::vector<std::pair<NodeId, NodeId>> edges;
  SplitMix64 rng(seed);
  const std::size_t n = blocks * nodes_per_block;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t bu = u / nodes_per_block;
    for (std::size_t v = 0; v < n; ++v) {
      const double p = bu == v / nodes_per_block ? p_in : p_out;
      if (rng.next_uniform() < p)
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  }
  if (edges.empty()) throw std::runtime_error("planted_graph: empty graph");
  return graph_from_edges(n, n, std::move(edges));
}

std::string to_json(const EvalReport& r) {
  std::ostringstream os;
  os << "{\"recall\": {";
  bool first = true;
  for (const auto& [n, v] : r.recall_at) {
    os << (first ? "" : ", ") << "\"" << n << "\": " << v;
    first = false;
  }
  os << "}, \"ndcg\": {";
  first = true;
  for (const auto& [n, v] : r.ndcg_at) {
    os << (first ? "" : ", ") << "\"" << n << "\": " << v;
    first = false;
  }
  os << "}, \"queries_evaluated\": " << r.queries_evaluated
     << ", \"queries_skipped\": " << r.queries_skipped
     << ", \"storage\": {\"code_bits\": " << r.code_bits
     << ", \"float32_bits\": " << r.float32_bits << ", \"ratio\": " << r.ratio
     << "}}";
  return os.str();
}

std::string to_tsv(const EvalReport& r) {
  std::ostringstream os;
  os << "metric\tN\tvalue\n";
  for (const auto& [n, v] : r.recall_at) os << "recall\t" << n << "\t" << v << "\n";
  for (const auto& [n, v] : r.ndcg_at) os << "ndcg\t" << n << "\t" << v << "\n";
  return os.str();
}

}  // namespace bgch
