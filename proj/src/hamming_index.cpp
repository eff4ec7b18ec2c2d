#include "bgch/hamming_index.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "bgch/bits.hpp"
#include "bgch/rng.hpp"

namespace bgch {

std::uint32_t hamming_distance(const std::uint64_t* a, const std::uint64_t* b,
                               std::size_t d_a, std::size_t d_b) {
  if (d_a != d_b) throw std::runtime_error("hamming_distance: dimension mismatch");
  return hamming_distance_raw(a, b, d_a);
}

HammingIndex::HammingIndex(const HashTable& table)
    : n1_(table.n1), n2_(table.n2), d_(table.d), layers_(table.layers),
      words_(table.words()) {
  const std::size_t segs = table.num_segments();
  codes_.resize(segs);
  alphas_.resize(segs);
  for (std::size_t l = 0; l < segs; ++l) {
    codes_[l].resize(n2_ * words_);
    alphas_[l].resize(n2_);
    for (std::size_t y = 0; y < n2_; ++y) {
      const std::uint64_t* src = table.code(n1_ + y, l);
      std::copy(src, src + words_, codes_[l].begin() + y * words_);
      alphas_[l][y] = table.alpha(n1_ + y, l);
    }
  }
  dense_.resize(n2_ * d_ * segs);
  for (std::size_t y = 0; y < n2_; ++y) {
    float* dst = dense_.data() + y * d_ * segs;
    for (std::size_t l = 0; l < segs; ++l) {
      const float a = alphas_[l][y];
      for (std::size_t i = 0; i < d_; ++i)
        dst[l * d_ + i] = a * table.code_bit(n1_ + y, l, i);
    }
  }
}

double HammingIndex::candidate_score(const std::uint64_t* qcodes,
                                     const float* qalphas,
                                     std::size_t y) const {
  const std::size_t segs = static_cast<std::size_t>(layers_) + 1;
  double s = 0.0;
  for (std::size_t l = 0; l < segs; ++l) {
    const std::int32_t dot =
        code_dot(qcodes + l * words_, codes_[l].data() + y * words_, d_);
    s += static_cast<double>(qalphas[l]) * alphas_[l][y] * dot;
  }
  return s;
}

namespace {

struct Candidate {
  double score;
  NodeId id;
};

// Worst candidate at the top: lowest score, then highest id.
struct WorseFirst {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  }
};

TopNResult drain(std::priority_queue<Candidate, std::vector<Candidate>,
                                     WorseFirst>& heap) {
  TopNResult result;
  result.items.resize(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    result.items[i] = {heap.top().id, heap.top().score};
    heap.pop();
  }
  return result;
}

}  // namespace

TopNResult HammingIndex::topn(const HashTable& table, std::size_t query_node,
                              std::size_t n,
                              const std::vector<bool>& exclude) const {
  if (n < 1) throw std::runtime_error("topn: n must be >= 1");
  const std::size_t segs = static_cast<std::size_t>(layers_) + 1;
  std::vector<std::uint64_t> qcodes(segs * words_);
  std::vector<float> qalphas(segs);
  for (std::size_t l = 0; l < segs; ++l) {
    const std::uint64_t* src = table.code(query_node, l);
    std::copy(src, src + words_, qcodes.begin() + l * words_);
    qalphas[l] = table.alpha(query_node, l);
  }
  std::priority_queue<Candidate, std::vector<Candidate>, WorseFirst> heap;
  for (std::size_t y = 0; y < n2_; ++y) {
    if (!exclude.empty() && exclude[y]) continue;
    const double s = candidate_score(qcodes.data(), qalphas.data(), y);
    Candidate c{s, static_cast<NodeId>(y)};
    if (heap.size() < n) {
      heap.push(c);
    } else if (WorseFirst{}(c, heap.top())) {
      heap.pop();
      heap.push(c);
    }
  }
  return drain(heap);
}

TopNResult HammingIndex::topn_float_baseline(
    const HashTable& table, std::size_t query_node, std::size_t n,
    const std::vector<bool>& exclude) const {
  const std::size_t segs = static_cast<std::size_t>(layers_) + 1;
  const std::size_t width = d_ * segs;
  std::vector<float> q(width);
  for (std::size_t l = 0; l < segs; ++l) {
    const float a = table.alpha(query_node, l);
    for (std::size_t i = 0; i < d_; ++i)
      q[l * d_ + i] = a * table.code_bit(query_node, l, i);
  }
  std::priority_queue<Candidate, std::vector<Candidate>, WorseFirst> heap;
  for (std::size_t y = 0; y < n2_; ++y) {
    if (!exclude.empty() && exclude[y]) continue;
    const float* cand = dense_.data() + y * width;
    float s = 0.0f;
    for (std::size_t i = 0; i < width; ++i) s += q[i] * cand[i];
    Candidate c{static_cast<double>(s), static_cast<NodeId>(y)};
    if (heap.size() < n) {
      heap.push(c);
    } else if (WorseFirst{}(c, heap.top())) {
      heap.pop();
      heap.push(c);
    }
  }
  return drain(heap);
}

BenchReport bench(const HammingIndex& index, const HashTable& table,
                  std::size_t query_count, std::size_t topn,
                  std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  SplitMix64 rng(seed);
  std::vector<std::size_t> queries(query_count);
  for (auto& q : queries)
    q = static_cast<std::size_t>(rng.next_u64() % table.n1);

  volatile double sink = 0.0;  // keep the scans from being optimized away
  auto t0 = clock::now();
  for (std::size_t q : queries) {
    auto r = index.topn(table, q, topn);
    sink += r.items.empty() ? 0.0 : r.items[0].second;
  }
  auto t1 = clock::now();
  for (std::size_t q : queries) {
    auto r = index.topn_float_baseline(table, q, topn);
    sink += r.items.empty() ? 0.0 : r.items[0].second;
  }
  auto t2 = clock::now();
  (void)sink;

  const double us_h =
      std::chrono::duration<double, std::micro>(t1 - t0).count() / query_count;
  const double us_f =
      std::chrono::duration<double, std::micro>(t2 - t1).count() / query_count;
  BenchReport r;
  r.queries = query_count;
  r.mean_us_hamming = us_h;
  r.mean_us_float = us_f;
  r.speedup = us_f / us_h;
  const double segs = index.layers() + 1;
  r.bops_per_query = static_cast<double>(index.n2()) * index.dim() * segs;
  r.flops_per_query = 4.0 * static_cast<double>(index.n2()) * segs;
  return r;
}

std::string to_json(const BenchReport& r) {
  std::ostringstream os;
  os << "{\"queries\": " << r.queries
     << ", \"mean_us_hamming\": " << r.mean_us_hamming
     << ", \"mean_us_float\": " << r.mean_us_float
     << ", \"speedup\": " << r.speedup
     << ", \"bops_per_query\": " << r.bops_per_query
     << ", \"flops_per_query\": " << r.flops_per_query << "}";
  return os.str();
}

}  // namespace bgch
