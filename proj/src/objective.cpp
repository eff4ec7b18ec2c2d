#include "bgch/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bgch/bits.hpp"

namespace bgch {

double score(const HashTable& table, std::size_t a, std::size_t b) {
  if (a >= table.num_nodes() || b >= table.num_nodes())
    throw std::runtime_error("score: node index out of range");
  double s = 0.0;
  for (std::size_t l = 0; l < table.num_segments(); ++l) {
    const std::int32_t dot = code_dot(table.code(a, l), table.code(b, l), table.d);
    s += static_cast<double>(table.alpha(a, l)) * table.alpha(b, l) * dot;
  }
  return s;
}

namespace {

// d(pair score)/d(alpha, Q-relaxed) for both endpoints, scaled by w
void accumulate_pair_grad(const HashTable& t, std::size_t a, std::size_t b,
                          double w, TableGrads& grads) {
  for (std::size_t l = 0; l < t.num_segments(); ++l) {
    const float aa = t.alpha(a, l);
    const float ab = t.alpha(b, l);
    const std::int32_t dot = code_dot(t.code(a, l), t.code(b, l), t.d);
    grads.alpha_at(a, l) += static_cast<float>(w * ab * dot);
    grads.alpha_at(b, l) += static_cast<float>(w * aa * dot);
    float* ga = grads.q_row(a, l);
    float* gb = grads.q_row(b, l);
    const float waa = static_cast<float>(w) * aa * ab;
    for (std::size_t i = 0; i < t.d; ++i) {
      ga[i] += waa * t.code_bit(b, l, i);
      gb[i] += waa * t.code_bit(a, l, i);
    }
  }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double bpr_loss(const std::vector<Triple>& batch, const HashTable& table,
                TableGrads& grads) {
  if (batch.empty()) throw std::runtime_error("bpr_loss: empty batch");
  double loss = 0.0;
  for (const Triple& t : batch) {
    const std::size_t x = t.x;
    const std::size_t yp = table.n1 + t.y_pos;
    const std::size_t yn = table.n1 + t.y_neg;
    double delta = score(table, x, yp) - score(table, x, yn);
    delta = std::clamp(delta, -40.0, 40.0);
    loss += -std::log(sigmoid(delta));
    const double g = sigmoid(delta) - 1.0;  // dL/d(delta)
    accumulate_pair_grad(table, x, yp, g, grads);
    accumulate_pair_grad(table, x, yn, -g, grads);
  }
  return loss;
}

namespace {

// Shared InfoNCE core: given the logit matrix m (b x b), returns the loss
// sum_x (logsumexp_x - m[x][x]) and fills dm with softmax(x) - onehot(x).
double info_nce(std::vector<double>& m, std::size_t b,
                std::vector<double>& dm) {
  double loss = 0.0;
  for (std::size_t x = 0; x < b; ++x) {
    double* row = m.data() + x * b;
    double mx = *std::max_element(row, row + b);
    double z = 0.0;
    for (std::size_t y = 0; y < b; ++y) z += std::exp(row[y] - mx);
    loss += mx + std::log(z) - row[x];
    for (std::size_t y = 0; y < b; ++y) {
      dm[x * b + y] = std::exp(row[y] - mx) / z - (x == y ? 1.0 : 0.0);
    }
  }
  return loss;
}

}  // namespace

double cl_loss_continuous(const AugmentedViews& views, float sigma,
                          ViewGrads& grads) {
  const std::size_t b = views.nodes.size();
  if (b <= 1) return 0.0;
  const std::size_t segs = views.segs();
  const std::size_t d = views.d;

  std::vector<double> m(b * b, 0.0), dm(b * b, 0.0);
  for (std::size_t x = 0; x < b; ++x) {
    for (std::size_t y = 0; y < b; ++y) {
      double dot = 0.0;
      for (std::size_t l = 0; l < segs; ++l) {
        const float* vx = views.view1(x, l);
        const float* vy = views.view2(y, l);
        for (std::size_t i = 0; i < d; ++i)
          dot += static_cast<double>(vx[i]) * vy[i];
      }
      m[x * b + y] = dot / sigma;
    }
  }
  double loss = info_nce(m, b, dm);
  for (std::size_t x = 0; x < b; ++x) {
    for (std::size_t y = 0; y < b; ++y) {
      const float w = static_cast<float>(dm[x * b + y] / sigma);
      if (w == 0.0f) continue;
      for (std::size_t l = 0; l < segs; ++l) {
        const float* vx = views.view1(x, l);
        const float* vy = views.view2(y, l);
        float* gx = grads.dv1.row(x * segs + l);
        float* gy = grads.dv2.row(y * segs + l);
        for (std::size_t i = 0; i < d; ++i) {
          gx[i] += w * vy[i];
          gy[i] += w * vx[i];
        }
      }
    }
  }
  return loss;
}

double cl_loss_binary(const AugmentedViews& views, const HashTable& table,
                      float sigma, ViewGrads& grads) {
  const std::size_t b = views.nodes.size();
  if (b <= 1) return 0.0;
  const std::size_t segs = views.segs();

  // per-layer code products between batch nodes; diagonal is d by +-1 norm
  std::vector<std::int32_t> qdot(b * b * segs);
  for (std::size_t x = 0; x < b; ++x)
    for (std::size_t y = 0; y < b; ++y)
      for (std::size_t l = 0; l < segs; ++l)
        qdot[(x * b + y) * segs + l] =
            code_dot(table.code(views.nodes[x], l),
                     table.code(views.nodes[y], l), table.d);

  std::vector<double> m(b * b, 0.0), dm(b * b, 0.0);
  for (std::size_t x = 0; x < b; ++x) {
    for (std::size_t y = 0; y < b; ++y) {
      double s = 0.0;
      for (std::size_t l = 0; l < segs; ++l)
        s += static_cast<double>(views.alpha1(x, l)) * views.alpha2(y, l) *
             qdot[(x * b + y) * segs + l];
      m[x * b + y] = s / sigma;
    }
  }
  double loss = info_nce(m, b, dm);
  for (std::size_t x = 0; x < b; ++x) {
    for (std::size_t y = 0; y < b; ++y) {
      const double w = dm[x * b + y] / sigma;
      if (w == 0.0) continue;
      for (std::size_t l = 0; l < segs; ++l) {
        const std::int32_t q = qdot[(x * b + y) * segs + l];
        grads.da1[x * segs + l] +=
            static_cast<float>(w * views.alpha2(y, l) * q);
        grads.da2[y * segs + l] +=
            static_cast<float>(w * views.alpha1(x, l) * q);
      }
    }
  }
  return loss;
}

LossBreakdown total_loss(double bpr, double cl1, double cl2, double reg,
                         float lambda1, float lambda2) {
  LossBreakdown out;
  out.bpr = bpr;
  out.cl1 = cl1;
  out.cl2 = cl2;
  out.reg = reg;
  out.total = bpr + static_cast<double>(lambda1) * (cl1 + cl2) +
              static_cast<double>(lambda2) * reg;
  if (!std::isfinite(out.total))
    throw std::runtime_error("total_loss: non-finite loss");
  return out;
}

}  // namespace bgch
