#pragma once

#include <cstdint>
#include <vector>

#include "bgch/augmentation.hpp"
#include "bgch/hash_model.hpp"

namespace bgch {

// (x in V1, observed neighbor, sampled non-neighbor); node ids are set-local,
// V2 ids get unified as n1+v at scoring time.
struct Triple {
  NodeId x;
  NodeId y_pos;
  NodeId y_neg;
};

struct LossBreakdown {
  double bpr{0.0};
  double cl1{0.0};
  double cl2{0.0};
  double reg{0.0};
  double total{0.0};
};

// Gradient accumulators over the whole table: d/d(alpha) and d/d(Q-relaxed),
// where Q-relaxed is the pre-sign variable the estimator chains through.
struct TableGrads {
  std::size_t d{0};
  std::size_t segs{0};
  Matrix q;                  // rows = n*(L+1), cols = d
  std::vector<float> alpha;  // n*(L+1)

  TableGrads() = default;
  TableGrads(std::size_t n, std::size_t d_, int layers)
      : d(d_), segs(static_cast<std::size_t>(layers) + 1),
        q(n * (layers + 1), d_), alpha(n * (layers + 1), 0.0f) {}

  void reset() {
    q.fill(0.0f);
    std::fill(alpha.begin(), alpha.end(), 0.0f);
  }
  float* q_row(std::size_t node, std::size_t l) { return q.row(node * segs + l); }
  float& alpha_at(std::size_t node, std::size_t l) {
    return alpha[node * segs + l];
  }
};

// Gradients with respect to the perturbed views; shapes mirror AugmentedViews.
struct ViewGrads {
  Matrix dv1, dv2;
  std::vector<float> da1, da2;

  explicit ViewGrads(const AugmentedViews& views)
      : dv1(views.v1.rows, views.v1.cols), dv2(views.v2.rows, views.v2.cols),
        da1(views.a1.size(), 0.0f), da2(views.a2.size(), 0.0f) {}
};

// Theorem-1 score: sum over layer segments of
// alpha_a^(l) alpha_b^(l) (d - 2 D_H(Q_a^(l), Q_b^(l))).
// Accumulated in float64; identical in value to the float inner product of
// the alpha-scaled +-1 vectors. Takes unified node indices.
double score(const HashTable& table, std::size_t a, std::size_t b);

// Returns sum of -ln sigmoid(Y_pos - Y_neg) over the batch; accumulates
// analytic gradients w.r.t. alpha and relaxed Q of every involved node.
// The sigmoid argument is clamped to [-40, 40].
double bpr_loss(const std::vector<Triple>& batch, const HashTable& table,
                TableGrads& grads);

// InfoNCE over the concatenated continuous views (Eq-style: the positive
// pair's term appears in the denominator). |batch| == 1 yields 0.
double cl_loss_continuous(const AugmentedViews& views, float sigma,
                          ViewGrads& grads);

// InfoNCE over the perturbed rescaling scalars with popcount code products;
// per-layer scalar products applied segment-wise and summed.
double cl_loss_binary(const AugmentedViews& views, const HashTable& table,
                      float sigma, ViewGrads& grads);

LossBreakdown total_loss(double bpr, double cl1, double cl2, double reg,
                         float lambda1, float lambda2);

}  // namespace bgch
