#include "bgch/augmentation.hpp"

#include <cmath>
#include <stdexcept>

namespace bgch {

void perturb_embedding(const float* v, const std::uint64_t* code,
                       std::size_t d, float tau, SplitMix64& rng, float* out) {
  if (tau <= 0.0f) throw std::runtime_error("perturb_embedding: tau must be > 0");
  std::vector<float> eps(d);
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      float sign = (code[i / 64] >> (i % 64)) & 1u ? 1.0f : -1.0f;
      eps[i] = static_cast<float>(rng.next_uniform()) * sign;
      norm_sq += static_cast<double>(eps[i]) * eps[i];
    }
  } while (norm_sq == 0.0);  // probability-zero redraw
  const float scale = static_cast<float>(tau / std::sqrt(norm_sq));
  for (std::size_t i = 0; i < d; ++i) out[i] = v[i] + eps[i] * scale;
}

float perturb_alpha(float alpha, SplitMix64& rng, AlphaNoise mode) {
  float u = static_cast<float>(rng.next_uniform());
  if (mode == AlphaNoise::kCentered) u -= 0.5f;
  return alpha + u;
}

AugmentedViews make_views(const EmbeddingState& state, const HashTable& table,
                          const std::vector<std::size_t>& batch, float tau,
                          std::uint64_t seed, std::uint64_t step,
                          AlphaNoise mode) {
  AugmentedViews views;
  views.nodes = batch;
  views.d = table.d;
  views.layers = table.layers;
  views.tau = tau;
  const std::size_t segs = views.segs();
  views.v1 = Matrix(batch.size() * segs, table.d);
  views.v2 = Matrix(batch.size() * segs, table.d);
  views.a1.resize(batch.size() * segs);
  views.a2.resize(batch.size() * segs);

  const std::int64_t bsz = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < bsz; ++b) {
    const std::size_t node = batch[static_cast<std::size_t>(b)];
    for (int view = 0; view < 2; ++view) {
      SplitMix64 rng(SplitMix64::mix(seed + 0x9e3779b9ULL * step,
                                     node * 2 + view));
      for (std::size_t l = 0; l < segs; ++l) {
        const float* v = state.layers[l].row(node);
        const std::uint64_t* q = table.code(node, l);
        const std::size_t row = static_cast<std::size_t>(b) * segs + l;
        Matrix& dst = view == 0 ? views.v1 : views.v2;
        perturb_embedding(v, q, table.d, tau, rng, dst.row(row));
        float a = perturb_alpha(table.alpha(node, l), rng, mode);
        (view == 0 ? views.a1 : views.a2)[row] = a;
      }
    }
  }
  return views;
}

}  // namespace bgch
