#pragma once

#include <cstdint>

#include "bgch/matrix.hpp"

namespace bgch {

// Optional rank-1 spectral damping of the layer-0 embeddings, applied once
// before training. Off by default.
struct DispersionConfig {
  bool enabled{false};
  float epsilon{0.5f};
  int k{2};
  std::uint64_t seed{1};
};

// p^(0) ~ N(0,I), p^(k) = V^T V p^(k-1). Renormalized to unit length each
// iteration; the projector is scale-invariant in p so this changes nothing.
std::vector<float> dispersing_vector(const Matrix& V, int k,
                                     std::uint64_t seed);

// V (I - eps * p p^T / ||p||^2)
Matrix disperse(const Matrix& V, const DispersionConfig& cfg);

}  // namespace bgch
