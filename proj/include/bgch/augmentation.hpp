#pragma once

#include <cstdint>
#include <vector>

#include "bgch/hash_model.hpp"
#include "bgch/matrix.hpp"
#include "bgch/rng.hpp"

namespace bgch {

enum class AlphaNoise { kUniform01, kCentered };

// Two noise-perturbed views of each batch node's continuous layer embeddings
// plus two perturbed views of each rescaling scalar. Rebuilt fresh every
// training step.
struct AugmentedViews {
  std::vector<std::size_t> nodes;  // batch node ids (unified index space)
  std::size_t d{0};
  int layers{0};  // L
  float tau{0.1f};

  // rows indexed by (batch position * (L+1) + layer)
  Matrix v1, v2;
  std::vector<float> a1, a2;

  std::size_t segs() const { return static_cast<std::size_t>(layers) + 1; }
  const float* view1(std::size_t b, std::size_t l) const {
    return v1.row(b * segs() + l);
  }
  const float* view2(std::size_t b, std::size_t l) const {
    return v2.row(b * segs() + l);
  }
  float alpha1(std::size_t b, std::size_t l) const { return a1[b * segs() + l]; }
  float alpha2(std::size_t b, std::size_t l) const { return a2[b * segs() + l]; }
};

// out = v + eps with eps = normalize(ebar .* Q) * tau, ebar ~ U(0,1)^d.
// The noise lies in the code's orthant and has L2 norm exactly tau.
void perturb_embedding(const float* v, const std::uint64_t* code,
                       std::size_t d, float tau, SplitMix64& rng, float* out);

float perturb_alpha(float alpha, SplitMix64& rng,
                    AlphaNoise mode = AlphaNoise::kUniform01);

// Deterministic per (seed, step, node, view): parallel and sequential
// execution produce identical views.
AugmentedViews make_views(const EmbeddingState& state, const HashTable& table,
                          const std::vector<std::size_t>& batch, float tau,
                          std::uint64_t seed, std::uint64_t step,
                          AlphaNoise mode = AlphaNoise::kUniform01);

}  // namespace bgch
