// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Pinned tolerances are stated inline next to each check.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bgch/augmentation.hpp"
#include "bgch/bits.hpp"
#include "bgch/dispersion.hpp"
#include "bgch/estimator.hpp"
#include "bgch/eval.hpp"
#include "bgch/hamming_index.hpp"
#include "bgch/objective.hpp"
#include "bgch/trainer.hpp"

using namespace bgch;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

HashTable random_table(std::size_t n1, std::size_t n2, std::size_t d,
                       int layers, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<float> nd;
  std::uniform_real_distribution<float> ud(0.2f, 1.5f);
  HashTable t;
  t.n1 = n1;
  t.n2 = n2;
  t.d = d;
  t.layers = layers;
  t.alphas.resize((n1 + n2) * t.num_segments());
  t.codes.resize((n1 + n2) * t.num_segments() * t.words());
  std::vector<float> row(d);
  for (std::size_t x = 0; x < n1 + n2; ++x)
    for (std::size_t l = 0; l < t.num_segments(); ++l) {
      for (auto& v : row) v = nd(rng);
      float unused = 0;
      hash_layer(row.data(), d, t.code(x, l), unused);
      t.alpha(x, l) = ud(rng);
    }
  return t;
}

bool close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b));
}

// ---------------------------------------------------------------- criterion 1
bool c1_theorem1() {
  std::mt19937 pick(1);
  int pairs = 0;
  for (std::size_t d : {std::size_t{8}, std::size_t{64}, std::size_t{256},
                        std::size_t{257}}) {
    for (int L : {0, 1, 2}) {
      HashTable t = random_table(20, 20, d, L, static_cast<unsigned>(d + L));
      while (pairs < (static_cast<int>(d) * 10 + (L + 1) * 280)) {
        const std::size_t a = pick() % 20;
        const std::size_t b = 20 + pick() % 20;
        double oracle = 0.0;
        for (std::size_t l = 0; l <= static_cast<std::size_t>(L); ++l)
          for (std::size_t i = 0; i < d; ++i)
            oracle += static_cast<double>(t.alpha(a, l)) * t.code_bit(a, l, i) *
                      t.alpha(b, l) * t.code_bit(b, l, i);
        const double got = score(t, a, b);
        if (std::fabs(got - oracle) > 1e-9 * std::max(1.0, std::fabs(oracle)))
          return false;
        ++pairs;
      }
      pairs = 0;
    }
  }
  // volume: 10,000 fresh pairs at d=256, L=2
  HashTable t = random_table(50, 200, 256, 2, 99);
  for (int k = 0; k < 10000; ++k) {
    const std::size_t a = pick() % 50;
    const std::size_t b = 50 + pick() % 200;
    double oracle = 0.0;
    for (std::size_t l = 0; l < 3; ++l)
      for (std::size_t i = 0; i < 256; ++i)
        oracle += static_cast<double>(t.alpha(a, l)) * t.code_bit(a, l, i) *
                  t.alpha(b, l) * t.code_bit(b, l, i);
    if (std::fabs(score(t, a, b) - oracle) >
        1e-9 * std::max(1.0, std::fabs(oracle)))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------- criterion 2
// Double-precision shadow pipeline on a micro graph: propagation by the dense
// normalized operator, codes relaxed to fourier_approx, alpha = mean |V|.
struct Shadow {
  std::size_t n, d;
  int L;
  std::vector<std::vector<double>> A;  // dense normalized operator
  EstimatorConfig est;

  std::vector<std::vector<double>> layers_of(
      const std::vector<double>& v0) const {
    std::vector<std::vector<double>> layers(L + 1);
    layers[0] = v0;
    for (int l = 1; l <= L; ++l) {
      layers[l].assign(n * d, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (A[i][j] != 0.0)
            for (std::size_t c = 0; c < d; ++c)
              layers[l][i * d + c] += A[i][j] * layers[l - 1][j * d + c];
    }
    return layers;
  }

  double pair_score(const std::vector<std::vector<double>>& layers,
                    std::size_t a, std::size_t b) const {
    double s = 0.0;
    for (int l = 0; l <= L; ++l) {
      double aa = 0.0, ab = 0.0, dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        aa += std::fabs(layers[l][a * d + i]);
        ab += std::fabs(layers[l][b * d + i]);
        dot += fourier_approx(layers[l][a * d + i], est.n, est.h) *
               fourier_approx(layers[l][b * d + i], est.n, est.h);
      }
      s += (aa / d) * (ab / d) * dot;
    }
    return s;
  }

  double loss(const std::vector<double>& v0,
              const std::vector<Triple>& triples, std::size_t n1) const {
    auto layers = layers_of(v0);
    double total = 0.0;
    for (const Triple& t : triples) {
      const double delta = pair_score(layers, t.x, n1 + t.y_pos) -
                           pair_score(layers, t.x, n1 + t.y_neg);
      total += std::log1p(std::exp(-std::clamp(delta, -40.0, 40.0)));
    }
    return total;
  }

  // Analytic gradient assembled with the production derivative pieces:
  // sign_backward for the code path, sign/d for the alpha path, and the
  // symmetric operator for the adjoint.
  std::vector<double> grad(const std::vector<double>& v0,
                           const std::vector<Triple>& triples,
                           std::size_t n1) const {
    auto layers = layers_of(v0);
    std::vector<std::vector<double>> g(L + 1,
                                       std::vector<double>(n * d, 0.0));
    auto add_pair = [&](std::size_t a, std::size_t b, double w) {
      for (int l = 0; l <= L; ++l) {
        double aa = 0.0, ab = 0.0, dot = 0.0;
        std::vector<double> qa(d), qb(d);
        for (std::size_t i = 0; i < d; ++i) {
          aa += std::fabs(layers[l][a * d + i]);
          ab += std::fabs(layers[l][b * d + i]);
          qa[i] = fourier_approx(layers[l][a * d + i], est.n, est.h);
          qb[i] = fourier_approx(layers[l][b * d + i], est.n, est.h);
          dot += qa[i] * qb[i];
        }
        aa /= d;
        ab /= d;
        for (std::size_t i = 0; i < d; ++i) {
          // alpha path: d(aa)/dV = sign(V)/d
          g[l][a * d + i] += w * ab * dot *
                             (layers[l][a * d + i] >= 0 ? 1.0 : -1.0) / d;
          g[l][b * d + i] += w * aa * dot *
                             (layers[l][b * d + i] >= 0 ? 1.0 : -1.0) / d;
          // code path through the production fourier backward
          g[l][a * d + i] += sign_backward(layers[l][a * d + i],
                                           w * aa * ab * qb[i], est);
          g[l][b * d + i] += sign_backward(layers[l][b * d + i],
                                           w * aa * ab * qa[i], est);
        }
      }
    };
    for (const Triple& t : triples) {
      const double delta = pair_score(layers, t.x, n1 + t.y_pos) -
                           pair_score(layers, t.x, n1 + t.y_neg);
      const double w = -1.0 / (1.0 + std::exp(std::clamp(delta, -40.0, 40.0)));
      add_pair(t.x, n1 + t.y_pos, w);
      add_pair(t.x, n1 + t.y_neg, -w);
    }
    // adjoint: dV0 = sum_l A^l g^(l), A symmetric
    std::vector<double> acc = g[L];
    for (int l = L - 1; l >= 0; --l) {
      std::vector<double> next(n * d, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (A[i][j] != 0.0)
            for (std::size_t c = 0; c < d; ++c)
              next[i * d + c] += A[i][j] * acc[j * d + c];
      for (std::size_t k = 0; k < n * d; ++k) next[k] += g[l][k];
      acc = std::move(next);
    }
    return acc;
  }
};

std::vector<std::vector<double>> dense_operator(const BipartiteGraph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> deg(n, 0);
  for (std::size_t i = 0; i < n; ++i) deg[i] = g.row_ptr[i + 1] - g.row_ptr[i];
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k) {
      const std::size_t j = g.col_idx[k];
      a[i][j] = 1.0 / std::sqrt(static_cast<double>(deg[i]) * deg[j]);
    }
  return a;
}

bool c2_gradients() {
  std::mt19937 seeds(2);
  int instances = 0;
  // (a) end-to-end shadow model vs central finite differences
  for (unsigned trial = 0; trial < 12; ++trial) {
    const std::size_t n1 = 3 + trial % 3, n2 = 4 + trial % 3;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::mt19937 er(100 + trial);
    for (NodeId u = 0; u < n1; ++u)
      for (NodeId v = 0; v < n2; ++v)
        if (er() % 100 < 45) edges.emplace_back(u, v);
    if (edges.empty()) edges.emplace_back(0, 0);
    BipartiteGraph g = graph_from_edges(n1, n2, edges);

    Shadow sh;
    sh.n = g.num_nodes();
    sh.d = 4 + 4 * (trial % 3);
    sh.L = static_cast<int>(trial % 3);
    sh.A = dense_operator(g);
    sh.est = EstimatorConfig{EstimatorKind::kFourier, 4 + 4 * (int)(trial % 3),
                             1.0f, 1.0f};

    std::vector<double> v0(sh.n * sh.d);
    std::normal_distribution<double> nd(0.0, 0.25);
    std::mt19937 vr(200 + trial);
    for (auto& x : v0) x = nd(vr);

    std::vector<Triple> triples;
    for (int k = 0; k < 3; ++k) {
      const auto& [u, v] = edges[er() % edges.size()];
      triples.push_back({u, v, static_cast<NodeId>(er() % n2)});
    }

    const std::vector<double> an = sh.grad(v0, triples, n1);
    // h small enough that the surrogate's curvature stays below the 1e-4
    // bar; the loss is double precision so cancellation noise is ~1e-11
    const double h = 1e-5;
    for (int probe = 0; probe < 40; ++probe) {
      const std::size_t idx = vr() % v0.size();
      // keep clear of the |.| and sign kinks where the loss is not smooth
      if (std::fabs(v0[idx]) < 5e-3) continue;
      const double keep = v0[idx];
      v0[idx] = keep + h;
      const double up = sh.loss(v0, triples, n1);
      v0[idx] = keep - h;
      const double dn = sh.loss(v0, triples, n1);
      v0[idx] = keep;
      if (!close(an[idx], (up - dn) / (2.0 * h), 1e-4)) return false;
    }
    ++instances;

    // production backprop agrees with the dense double adjoint on the same
    // per-layer payloads
    NormalizedOperator op = normalize(g);
    std::vector<Matrix> gl(sh.L + 1, Matrix(sh.n, sh.d));
    std::vector<std::vector<double>> gd(sh.L + 1,
                                        std::vector<double>(sh.n * sh.d));
    for (int l = 0; l <= sh.L; ++l)
      for (std::size_t k = 0; k < sh.n * sh.d; ++k) {
        gl[l].data[k] = static_cast<float>(nd(vr));
        gd[l][k] = gl[l].data[k];
      }
    std::vector<double> want = gd[sh.L];
    for (int l = sh.L - 1; l >= 0; --l) {
      std::vector<double> next(sh.n * sh.d, 0.0);
      for (std::size_t i = 0; i < sh.n; ++i)
        for (std::size_t j = 0; j < sh.n; ++j)
          if (sh.A[i][j] != 0.0)
            for (std::size_t c = 0; c < sh.d; ++c)
              next[i * sh.d + c] += sh.A[i][j] * want[j * sh.d + c];
      for (std::size_t k = 0; k < sh.n * sh.d; ++k) next[k] += gd[l][k];
      want = std::move(next);
    }
    Matrix got = backprop(op, std::move(gl));
    for (std::size_t k = 0; k < want.size(); ++k)
      if (!close(got.data[k], want[k], 1e-4)) return false;
  }

  // (b) BPR alpha gradients + relaxed-Q gradients vs FD on the score form
  for (unsigned trial = 0; trial < 8; ++trial) {
    HashTable t = random_table(4, 5, 16, 1, 300 + trial);
    std::vector<Triple> triples = {{0, 1, 3}, {2, 0, 4}, {3, 2, 1}};
    TableGrads grads(t.num_nodes(), t.d, t.layers);
    bpr_loss(triples, t, grads);
    const float h = 1e-3f;
    TableGrads scratch(t.num_nodes(), t.d, t.layers);
    for (std::size_t x = 0; x < t.num_nodes(); ++x)
      for (std::size_t l = 0; l < t.num_segments(); ++l) {
        const float keep = t.alpha(x, l);
        t.alpha(x, l) = keep + h;
        scratch.reset();
        const double up = bpr_loss(triples, t, scratch);
        t.alpha(x, l) = keep - h;
        scratch.reset();
        const double dn = bpr_loss(triples, t, scratch);
        t.alpha(x, l) = keep;
        if (!close(grads.alpha_at(x, l), (up - dn) / (2.0 * h), 1e-4))
          return false;
      }
    ++instances;
  }

  // (c) both contrastive losses vs FD (as in the module tests, full sweep)
  for (unsigned trial = 0; trial < 4; ++trial) {
    HashTable t = random_table(4, 4, 16, 1, 400 + trial);
    std::mt19937 rng(500 + trial);
    std::normal_distribution<float> nd;
    std::uniform_real_distribution<float> ud(0.5f, 1.5f);
    AugmentedViews v;
    v.nodes = {0, 1, 2, 5, 6, 7};
    v.d = 16;
    v.layers = 1;
    v.v1 = Matrix(v.nodes.size() * 2, 16);
    v.v2 = Matrix(v.nodes.size() * 2, 16);
    for (auto& x : v.v1.data) x = nd(rng);
    for (auto& x : v.v2.data) x = nd(rng);
    v.a1.resize(v.nodes.size() * 2);
    v.a2.resize(v.nodes.size() * 2);
    for (auto& x : v.a1) x = ud(rng);
    for (auto& x : v.a2) x = ud(rng);

    const float sigma = 0.2f, h = 1e-3f;
    ViewGrads g1(v);
    cl_loss_continuous(v, sigma, g1);
    for (int probe = 0; probe < 50; ++probe) {
      Matrix& m = (rng() & 1) ? v.v1 : v.v2;
      const Matrix& gm = (&m == &v.v1) ? g1.dv1 : g1.dv2;
      const std::size_t idx = rng() % m.data.size();
      const float keep = m.data[idx];
      ViewGrads scratch(v);
      m.data[idx] = keep + h;
      const double up = cl_loss_continuous(v, sigma, scratch);
      m.data[idx] = keep - h;
      const double dn = cl_loss_continuous(v, sigma, scratch);
      m.data[idx] = keep;
      if (!close(gm.data[idx], (up - dn) / (2.0 * h), 1e-4)) return false;
    }
    ViewGrads g2(v);
    cl_loss_binary(v, t, sigma, g2);
    for (std::size_t idx = 0; idx < v.a1.size(); ++idx)
      for (int side = 0; side < 2; ++side) {
        std::vector<float>& a = side ? v.a2 : v.a1;
        const std::vector<float>& ga = side ? g2.da2 : g2.da1;
        const float keep = a[idx];
        ViewGrads scratch(v);
        a[idx] = keep + h;
        const double up = cl_loss_binary(v, t, sigma, scratch);
        a[idx] = keep - h;
        const double dn = cl_loss_binary(v, t, sigma, scratch);
        a[idx] = keep;
        if (!close(ga[idx], (up - dn) / (2.0 * h), 1e-4)) return false;
      }
    ++instances;
  }
  return instances >= 20;
}

// ---------------------------------------------------------------- criterion 3
bool c3_fourier() {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ud(-0.999, 0.999);
  for (int n : {4, 8, 16}) {
    EstimatorConfig cfg{EstimatorKind::kFourier, n, 1.0f, 1.0f};
    for (int k = 0; k < 1000; ++k) {
      const double phi = ud(rng);
      const double h = 1e-6;
      const double fd =
          (fourier_approx(phi + h, n, 1.0) - fourier_approx(phi - h, n, 1.0)) /
          (2.0 * h);
      if (!close(sign_backward(phi, 1.0, cfg), fd, 1e-6)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- criterion 4
bool c4_retrieval() {
  HashTable t = random_table(100, 5000, 128, 2, 4);
  HammingIndex idx(t);
  for (std::size_t q = 0; q < 100; ++q) {
    TopNResult a = idx.topn(t, q, 50);
    TopNResult b = idx.topn_float_baseline(t, q, 50);
    if (a.items.size() != b.items.size()) return false;
    for (std::size_t i = 0; i < a.items.size(); ++i)
      if (a.items[i].first != b.items[i].first) return false;
  }
  return true;
}

// ------------------------------------------------------------- criteria 5 & 6
RunConfig planted_config(std::uint64_t seed) {
  RunConfig cfg;
  cfg.d = 64;
  cfg.layers = 2;
  cfg.seed = seed;
  cfg.epochs = 60;
  cfg.batch_size = 256;
  cfg.lr = 1e-2f;
  cfg.lambda1 = 0.01f;
  cfg.sigma = 0.5f;
  cfg.estimator.n = 8;
  return cfg;
}

bool c5_learning(std::string& detail) {
  int wins = 0;
  double recall_sum = 0.0, baseline_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    BipartiteGraph g = planted_graph(4, 50, 0.3, 0.01, 1000 + seed);
    SplitResult sp = split(g, 0.2, 2000 + seed);
    RunConfig cfg = planted_config(seed);

    TrainResult full = train(cfg, sp.train);
    EvalReport full_rep =
        evaluate_table(full.table, sp.train, sp.test_edges, {20});

    RunConfig nocl = apply_variant(cfg, AblationVariant::kNoCl);
    TrainResult ab = train(nocl, sp.train);
    EvalReport ab_rep = evaluate_table(ab.table, sp.train, sp.test_edges, {20});

    if (full_rep.recall_at[20] >= ab_rep.recall_at[20]) ++wins;
    recall_sum += full_rep.recall_at[20];

    // analytic random baseline: E[recall@20] for uniform ranking over the
    // non-train candidates = 20 / (n2 - |train(x)|), averaged over queries
    std::vector<std::size_t> train_deg(g.n1, 0);
    for (const auto& [u, v] : sp.train.edges) ++train_deg[u];
    std::vector<bool> has_truth(g.n1, false);
    for (const auto& [u, v] : sp.test_edges) has_truth[u] = true;
    double base = 0.0;
    std::size_t cnt = 0;
    for (std::size_t u = 0; u < g.n1; ++u)
      if (has_truth[u]) {
        base += std::min(1.0, 20.0 / (g.n2 - train_deg[u]));
        ++cnt;
      }
    baseline_sum += base / cnt;
  }
  const double mean_recall = recall_sum / 10.0;
  const double mean_base = baseline_sum / 10.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "mean recall@20 %.3f vs random %.3f (%.1fx), full>=no_cl in "
                "%d/10 seeds",
                mean_recall, mean_base, mean_recall / mean_base, wins);
  detail = buf;
  return mean_recall >= 5.0 * mean_base && wins >= 7;
}

// Pinned threshold: per-triple BPR of 0.67 (just under the ln 2 start line;
// reached within the epoch budget by both arms on this graph).
bool c6_convergence(std::string& detail) {
  constexpr double kThreshold = 0.67;
  std::vector<int> with_dfcl, without_dfcl;
  auto epochs_to = [](const TrainResult& r) {
    for (const EpochLog& e : r.log)
      if (e.bpr_per_triple <= kThreshold) return e.epoch + 1;
    return 1000;
  };
  for (std::uint64_t seed = 21; seed <= 25; ++seed) {
    BipartiteGraph g = planted_graph(4, 50, 0.3, 0.01, 3000 + seed);
    RunConfig cfg = planted_config(seed);
    with_dfcl.push_back(epochs_to(train(cfg, g)));
    without_dfcl.push_back(
        epochs_to(train(apply_variant(cfg, AblationVariant::kNoCl), g)));
  }
  std::sort(with_dfcl.begin(), with_dfcl.end());
  std::sort(without_dfcl.begin(), without_dfcl.end());
  const int med_with = with_dfcl[2], med_without = without_dfcl[2];
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "median epochs to bpr<=%.2f: with DFCL %d, without %d",
                kThreshold, med_with, med_without);
  detail = buf;
  return med_with <= med_without && med_with < 1000;
}

// ---------------------------------------------------------------- criterion 7
bool c7_compression() {
  for (auto [d, L] : {std::pair<std::size_t, int>{64, 2}, {128, 1}, {96, 3}}) {
    BipartiteGraph g = planted_graph(2, 6, 0.5, 0.1, d + L);
    ModelConfig mcfg{d, L, 0.1f, 5};
    EmbeddingState s =
        forward(normalize(g), init_embeddings(g.num_nodes(), mcfg), mcfg);
    HashTable t = assemble(s, g.n1, g.n2);
    const std::string path = "/tmp/bgch_accept_table.bin";
    save_hash_table(t, path);
    const std::size_t want =
        32 + t.num_nodes() * t.num_segments() * (4 + t.words() * 8);
    if (std::filesystem::file_size(path) != want) return false;
    if (serialized_size_bytes(t) != want) return false;
  }
  const double r = compression_report(1024, 4).paper_ratio;
  return std::fabs(r - 27.68) <= 0.01 &&
         std::fabs(compression_report(256, 2).paper_ratio - 8192.0 / 352.0) <
             1e-9;
}

// ---------------------------------------------------------------- criterion 8
bool c8_speed(std::string& detail) {
  HashTable t = random_table(32, 50000, 256, 2, 8);
  HammingIndex idx(t);
  BenchReport r = bench(idx, t, 200, 10, 11);
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "hamming %.1f us/query, float %.1f us/query, speedup %.2fx",
                r.mean_us_hamming, r.mean_us_float, r.speedup);
  detail = buf;
  return r.speedup >= 4.0;
}

// ---------------------------------------------------------------- criterion 9
bool c9_augmentation() {
  BipartiteGraph g = planted_graph(2, 20, 0.4, 0.05, 9);
  ModelConfig mcfg{48, 1, 0.3f, 10};
  EmbeddingState s =
      forward(normalize(g), init_embeddings(g.num_nodes(), mcfg), mcfg);
  HashTable t = assemble(s, g.n1, g.n2);

  SplitMix64 rng(77);
  std::vector<float> out(t.d);
  const float tau = 0.1f;
  for (int k = 0; k < 10000; ++k) {
    const std::size_t node = k % t.num_nodes();
    const std::size_t l = k % t.num_segments();
    const float* v = s.layers[l].row(node);
    perturb_embedding(v, t.code(node, l), t.d, tau, rng, out.data());
    double norm = 0.0;
    for (std::size_t i = 0; i < t.d; ++i) {
      const double eps = static_cast<double>(out[i]) - v[i];
      norm += eps * eps;
      if (eps * t.code_bit(node, l, i) < 0.0) return false;  // orthant, exact
    }
    if (std::fabs(std::sqrt(norm) - tau) > 1e-5 * tau) return false;
  }
  return true;
}

// --------------------------------------------------------------- criterion 10
bool c10_dispersion() {
  std::mt19937 rng(10);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd base(12, 6);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 6; ++j) base(i, j) = nd(rng);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd0(
      base, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv(6);
  sv << 9.0, 3.0, 2.0, 1.5, 1.0, 0.8;
  Eigen::MatrixXd shaped =
      svd0.matrixU() * sv.asDiagonal() * svd0.matrixV().transpose();
  Matrix v(12, 6);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 6; ++j) v.at(i, j) = static_cast<float>(shaped(i, j));

  // projector idempotence <= 1e-6
  auto p = dispersing_vector(v, 3, 11);
  Eigen::VectorXd pe(6);
  for (int j = 0; j < 6; ++j) pe(j) = p[j];
  Eigen::MatrixXd proj = pe * pe.transpose() / pe.squaredNorm();
  if ((proj * proj - proj).cwiseAbs().maxCoeff() > 1e-6) return false;

  // shrinkage along p: component scaled by exactly (1 - eps), float tolerance
  const float eps = 0.35f;
  DispersionConfig cfg{true, eps, 3, 11};
  Matrix out = disperse(v, cfg);
  Eigen::MatrixXd oe(12, 6), ve(12, 6);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 6; ++j) {
      oe(i, j) = out.at(i, j);
      ve(i, j) = v.at(i, j);
    }
  Eigen::VectorXd phat = pe.normalized();
  if (std::fabs((oe * phat).norm() - (1.0 - eps) * (ve * phat).norm()) >
      1e-4 * (ve * phat).norm())
    return false;

  // spectrum flattening in the mean over 100 seeds
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_in(ve);
  const double ratio_in =
      svd_in.singularValues()(0) / svd_in.singularValues()(5);
  double mean_ratio = 0.0;
  for (int s = 0; s < 100; ++s) {
    DispersionConfig c{true, 0.4f, 2, static_cast<std::uint64_t>(5000 + s)};
    Matrix o = disperse(v, c);
    Eigen::MatrixXd om(12, 6);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 6; ++j) om(i, j) = o.at(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> so(om);
    mean_ratio += so.singularValues()(0) / so.singularValues()(5);
  }
  mean_ratio /= 100.0;
  return mean_ratio < ratio_in;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, bool ok,
                    const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", id, name,
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  };

  std::string detail;

  auto t0 = Clock::now();
  report(1, "Theorem-1 exactness (10k pairs, <=1e-9 rel)", c1_theorem1());
  report(2, "gradient correctness (24 instances, FD 1e-4 rel)",
         c2_gradients());
  report(3, "fourier estimator fidelity (n in {4,8,16}, 1e-6 rel)",
         c3_fourier());
  report(4, "retrieval exactness (100 queries x 5000 candidates)",
         c4_retrieval());
  detail.clear();
  {
    const bool ok = c5_learning(detail);
    report(5, "learning signal on the planted graph", ok, detail);
  }
  detail.clear();
  {
    const bool ok = c6_convergence(detail);
    report(6, "convergence benefit of the contrastive terms", ok, detail);
  }
  report(7, "compression accounting (format exact, ratio 27.68 +/- 0.01)",
         c7_compression());
  detail.clear();
  {
    const bool ok = c8_speed(detail);
    report(8, "popcount speedup >= 4x at d=256, L=2, 50k candidates", ok,
           detail);
  }
  report(9, "augmentation constraints (10k samples, norm 1e-5 rel)",
         c9_augmentation());
  report(10, "dispersion properties", c10_dispersion());

  std::printf("%d/10 criteria passed (%.1f s)\n", 10 - failures,
              seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
