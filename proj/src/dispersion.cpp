#include "bgch/dispersion.hpp"

#include <cmath>
#include <stdexcept>

#include "bgch/rng.hpp"

namespace bgch {

namespace {

bool all_zero(const Matrix& V) {
  for (float x : V.data)
    if (x != 0.0f) return false;
  return true;
}

void unit_normalize(std::vector<float>& p) {
  double s = 0.0;
  for (float x : p) s += static_cast<double>(x) * x;
  s = std::sqrt(s);
  if (s == 0.0) throw std::runtime_error("dispersing vector collapsed to zero");
  for (float& x : p) x = static_cast<float>(x / s);
}

}  // namespace

std::vector<float> dispersing_vector(const Matrix& V, int k,
                                     std::uint64_t seed) {
  if (k < 1) throw std::runtime_error("dispersion: k must be >= 1");
  if (all_zero(V)) throw std::runtime_error("dispersion: all-zero matrix");
  const std::size_t c = V.cols;
  SplitMix64 rng(seed);
  std::vector<float> p(c);
  for (auto& x : p) x = static_cast<float>(rng.next_normal());

  std::vector<float> vp(V.rows);
  for (int it = 0; it < k; ++it) {
    // vp = V p
    for (std::size_t i = 0; i < V.rows; ++i) {
      double s = 0.0;
      const float* row = V.row(i);
      for (std::size_t j = 0; j < c; ++j) s += static_cast<double>(row[j]) * p[j];
      vp[i] = static_cast<float>(s);
    }
    // p = V^T vp
    std::vector<float> next(c, 0.0f);
    for (std::size_t i = 0; i < V.rows; ++i) {
      const float* row = V.row(i);
      for (std::size_t j = 0; j < c; ++j) next[j] += row[j] * vp[i];
    }
    unit_normalize(next);
    p.swap(next);
  }
  return p;
}

Matrix disperse(const Matrix& V, const DispersionConfig& cfg) {
  if (!cfg.enabled) return V;
  if (cfg.epsilon <= 0.0f || cfg.epsilon >= 1.0f)
    throw std::runtime_error("dispersion: epsilon must lie in (0,1)");
  std::vector<float> p = dispersing_vector(V, cfg.k, cfg.seed);
  // unit p: V(I - eps P) = V - eps (V p) p^T
  Matrix out = V;
  for (std::size_t i = 0; i < V.rows; ++i) {
    const float* src = V.row(i);
    double vp = 0.0;
    for (std::size_t j = 0; j < V.cols; ++j)
      vp += static_cast<double>(src[j]) * p[j];
    float* dst = out.row(i);
    for (std::size_t j = 0; j < V.cols; ++j)
      dst[j] = src[j] - cfg.epsilon * static_cast<float>(vp) * p[j];
  }
  return out;
}

}  // namespace bgch
