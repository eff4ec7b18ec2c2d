#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bgch/graph.hpp"
#include "bgch/matrix.hpp"

namespace bgch {

enum class EstimatorKind { kFourier, kSte, kTanh };

struct EstimatorConfig {
  EstimatorKind kind{EstimatorKind::kFourier};
  int n{8};          // upper summation bound; odd i <= n are summed
  float h{1.0f};     // half-period
  float tanh_beta{1.0f};
};

EstimatorKind estimator_kind_from_string(const std::string& s);
std::string to_string(EstimatorKind kind);

// Forward is always the exact sign, independent of the estimator: 0 -> +1.
inline float sign_forward(float phi) { return phi >= 0.0f ? 1.0f : -1.0f; }

// (4/pi) sum_{i odd <= n} (1/i) sin(pi i phi / H) — truncated square wave
double fourier_approx(double phi, int n, double h);

// Surrogate local derivative of sign at phi, times the upstream gradient.
double sign_backward(double phi, double upstream, const EstimatorConfig& cfg);

// Accumulates per-layer contributions down the propagation stack:
// dL/dV0 = sum_l A_hat^l G^(l) (A_hat is symmetric, so the adjoint reuses
// the forward operator). grads_at_layers has L+1 entries.
Matrix backprop(const NormalizedOperator& op,
                std::vector<Matrix> grads_at_layers);

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t rows, std::size_t cols, float lr,
                float beta1 = 0.9f, float beta2 = 0.999f, float eps = 1e-8f);

  void step(Matrix& params, const Matrix& grad);

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  float lr_, beta1_, beta2_, eps_;
  std::int64_t t_{0};
  Matrix m_, v_;
};

}  // namespace bgch
