#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bgch/hash_model.hpp"

namespace bgch {

struct TopNResult {
  std::vector<std::pair<NodeId, double>> items;  // (V2 node id, score),
                                                 // descending score,
                                                 // ties by ascending id
};

// Query-time engine over the V2 side of a hash table. Codes and factors are
// laid out contiguously per layer segment for cache-linear scans. Immutable
// and shareable; queries are embarrassingly parallel.
class HammingIndex {
 public:
  explicit HammingIndex(const HashTable& table);

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t dim() const { return d_; }
  int layers() const { return layers_; }

  // Exact Top-N by the segment-sum score over all V2 candidates. `exclude`,
  // when non-empty, is an n2-sized bitmap of candidates to skip.
  TopNResult topn(const HashTable& table, std::size_t query_node,
                  std::size_t n,
                  const std::vector<bool>& exclude = {}) const;

  // Same scan with the candidate scores computed by float32 inner products
  // of the alpha-scaled +-1 vectors; the baseline for benchmarking.
  TopNResult topn_float_baseline(const HashTable& table,
                                 std::size_t query_node, std::size_t n,
                                 const std::vector<bool>& exclude = {}) const;

 private:
  std::size_t n1_{0}, n2_{0}, d_{0};
  int layers_{0};
  std::size_t words_{0};
  // per segment: codes_[l] has n2*words_ words, alphas_[l] has n2 floats
  std::vector<std::vector<std::uint64_t>> codes_;
  std::vector<std::vector<float>> alphas_;
  // float32 candidate matrix for the baseline: n2 x d*(L+1)
  std::vector<float> dense_;

  double candidate_score(const std::uint64_t* qcodes, const float* qalphas,
                         std::size_t y) const;
};

std::uint32_t hamming_distance(const std::uint64_t* a, const std::uint64_t* b,
                               std::size_t d_a, std::size_t d_b);

struct BenchReport {
  std::size_t queries{0};
  double mean_us_hamming{0.0};
  double mean_us_float{0.0};
  double speedup{0.0};
  double bops_per_query{0.0};
  double flops_per_query{0.0};
};

// Single-threaded wall-time per query for the popcount path vs the float32
// dot-product baseline over identical candidates.
BenchReport bench(const HammingIndex& index, const HashTable& table,
                  std::size_t query_count, std::size_t topn,
                  std::uint64_t seed);

std::string to_json(const BenchReport& report);

}  // namespace bgch
