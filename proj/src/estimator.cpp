#include "bgch/estimator.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace bgch {

EstimatorKind estimator_kind_from_string(const std::string& s) {
  if (s == "fourier") return EstimatorKind::kFourier;
  if (s == "ste") return EstimatorKind::kSte;
  if (s == "tanh") return EstimatorKind::kTanh;
  throw std::runtime_error("unknown estimator kind: " + s);
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kFourier: return "fourier";
    case EstimatorKind::kSte: return "ste";
    case EstimatorKind::kTanh: return "tanh";
  }
  return "?";
}

double fourier_approx(double phi, int n, double h) {
  double s = 0.0;
  for (int i = 1; i <= n; i += 2) s += std::sin(M_PI * i * phi / h) / i;
  return 4.0 / M_PI * s;
}

double sign_backward(double phi, double upstream, const EstimatorConfig& cfg) {
  switch (cfg.kind) {
    case EstimatorKind::kFourier: {
      double s = 0.0;
      for (int i = 1; i <= cfg.n; i += 2) s += std::cos(M_PI * i * phi / cfg.h);
      return upstream * 4.0 / cfg.h * s;
    }
    case EstimatorKind::kSte:
      return std::fabs(phi) <= 1.0 ? upstream : 0.0;
    case EstimatorKind::kTanh: {
      const double t = std::tanh(cfg.tanh_beta * phi);
      return upstream * cfg.tanh_beta * (1.0 - t * t);
    }
  }
  return 0.0;
}

Matrix backprop(const NormalizedOperator& op,
                std::vector<Matrix> grads_at_layers) {
  if (grads_at_layers.empty())
    throw std::runtime_error("backprop: no layer gradients");
  Matrix acc = std::move(grads_at_layers.back());
  grads_at_layers.pop_back();
  Matrix scratch;
  while (!grads_at_layers.empty()) {
    propagate(op, acc, scratch);
    Matrix& g = grads_at_layers.back();
    if (!scratch.same_shape(g))
      throw std::runtime_error("backprop: shape mismatch");
    for (std::size_t i = 0; i < scratch.data.size(); ++i)
      scratch.data[i] += g.data[i];
    acc = std::move(scratch);
    scratch = Matrix();
    grads_at_layers.pop_back();
  }
  return acc;
}

AdamOptimizer::AdamOptimizer(std::size_t rows, std::size_t cols, float lr,
                             float beta1, float beta2, float eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(rows, cols), v_(rows, cols) {}

void AdamOptimizer::step(Matrix& params, const Matrix& grad) {
  if (!params.same_shape(grad) || !params.same_shape(m_))
    throw std::runtime_error("adam: shape mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.data.size(); ++i) {
    const float g = grad.data[i];
    m_.data[i] = beta1_ * m_.data[i] + (1.0f - beta1_) * g;
    v_.data[i] = beta2_ * v_.data[i] + (1.0f - beta2_) * g * g;
    const double mhat = m_.data[i] / bc1;
    const double vhat = v_.data[i] / bc2;
    params.data[i] -=
        static_cast<float>(lr_ * mhat / (std::sqrt(vhat) + eps_));
  }
}

void AdamOptimizer::save(std::ostream& out) const {
  out.write(reinterpret_cast<const char*>(&t_), sizeof(t_));
  out.write(reinterpret_cast<const char*>(m_.data.data()),
            m_.data.size() * sizeof(float));
  out.write(reinterpret_cast<const char*>(v_.data.data()),
            v_.data.size() * sizeof(float));
}

void AdamOptimizer::load(std::istream& in) {
  in.read(reinterpret_cast<char*>(&t_), sizeof(t_));
  in.read(reinterpret_cast<char*>(m_.data.data()),
          m_.data.size() * sizeof(float));
  in.read(reinterpret_cast<char*>(v_.data.data()),
          v_.data.size() * sizeof(float));
  if (!in) throw std::runtime_error("adam: truncated checkpoint state");
}

}  // namespace bgch
