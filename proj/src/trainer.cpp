#include "bgch/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "bgch/hamming_index.hpp"

namespace bgch {

void RunConfig::validate() const {
  if (d < 1) throw std::runtime_error("config: d must be >= 1");
  if (layers < 0 || layers > 4)
    throw std::runtime_error("config: layers must lie in [0, 4]");
  if (tau <= 0.0f) throw std::runtime_error("config: cl.tau must be > 0");
  if (sigma <= 0.0f) throw std::runtime_error("config: cl.sigma must be > 0");
  if (estimator.n < 1) throw std::runtime_error("config: estimator.n must be >= 1");
  if (estimator.h <= 0.0f) throw std::runtime_error("config: estimator.h must be > 0");
  if (lr <= 0.0f) throw std::runtime_error("config: optim.lr must be > 0");
  if (epochs < 0) throw std::runtime_error("config: train.epochs must be >= 0");
  if (batch_size < 1) throw std::runtime_error("config: train.batch_size must be >= 1");
  if (dispersion.enabled) {
    if (dispersion.epsilon <= 0.0f || dispersion.epsilon >= 1.0f)
      throw std::runtime_error("config: dispersion.epsilon must lie in (0,1)");
    if (dispersion.k < 1)
      throw std::runtime_error("config: dispersion.k must be >= 1");
  }
}

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value) {
  auto as_u64 = [&] { return std::stoull(value); };
  auto as_int = [&] { return std::stoi(value); };
  auto as_f = [&] { return std::stof(value); };
  auto as_bool = [&] {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::runtime_error("config: bad boolean for " + key + ": " + value);
  };

  if (key == "model.d") cfg.d = as_u64();
  else if (key == "model.layers") cfg.layers = as_int();
  else if (key == "model.init_scale") cfg.init_scale = as_f();
  else if (key == "model.seed") cfg.seed = as_u64();
  else if (key == "dispersion.enabled") cfg.dispersion.enabled = as_bool();
  else if (key == "dispersion.epsilon") cfg.dispersion.epsilon = as_f();
  else if (key == "dispersion.k") cfg.dispersion.k = as_int();
  else if (key == "dispersion.seed") cfg.dispersion.seed = as_u64();
  else if (key == "cl.tau") cfg.tau = as_f();
  else if (key == "cl.sigma") cfg.sigma = as_f();
  else if (key == "cl.seed") cfg.cl_seed = as_u64();
  else if (key == "cl.alpha_noise") {
    if (value == "uniform01") cfg.alpha_noise = AlphaNoise::kUniform01;
    else if (value == "centered") cfg.alpha_noise = AlphaNoise::kCentered;
    else throw std::runtime_error("config: bad cl.alpha_noise: " + value);
  }
  else if (key == "cl.grad_through_alpha") cfg.grad_through_alpha = as_bool();
  else if (key == "loss.lambda1") cfg.lambda1 = as_f();
  else if (key == "loss.lambda2") cfg.lambda2 = as_f();
  else if (key == "train.neg_samples") cfg.neg_samples = as_int();
  else if (key == "estimator.kind")
    cfg.estimator.kind = estimator_kind_from_string(value);
  else if (key == "estimator.n") cfg.estimator.n = as_int();
  else if (key == "estimator.h") cfg.estimator.h = as_f();
  else if (key == "estimator.tanh_beta") cfg.estimator.tanh_beta = as_f();
  else if (key == "optim.lr") cfg.lr = as_f();
  else if (key == "train.epochs") cfg.epochs = as_int();
  else if (key == "train.batch_size") cfg.batch_size = as_u64();
  else if (key == "train.log_every") cfg.log_every = as_int();
  else if (key == "train.checkpoint_every") cfg.checkpoint_every = as_int();
  else if (key == "data.train") cfg.train_path = value;
  else if (key == "out.table") cfg.output_table = value;
  else if (key == "out.checkpoint") cfg.checkpoint_path = value;
  else if (key == "train.resume_from") cfg.resume_from = value;
  else throw std::runtime_error("config: unknown key: " + key);
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: missing '=' at line " +
                               std::to_string(lineno));
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto strip = [](std::string& s) {
      auto b2 = s.find_first_not_of(" \t");
      auto e2 = s.find_last_not_of(" \t");
      s = b2 == std::string::npos ? "" : s.substr(b2, e2 - b2 + 1);
    };
    strip(key);
    strip(value);
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

std::string to_json(const RunConfig& c) {
  std::ostringstream os;
  os << "{"
     << "\"model.d\": " << c.d << ", \"model.layers\": " << c.layers
     << ", \"model.init_scale\": " << c.init_scale
     << ", \"model.seed\": " << c.seed
     << ", \"dispersion.enabled\": " << (c.dispersion.enabled ? "true" : "false")
     << ", \"dispersion.epsilon\": " << c.dispersion.epsilon
     << ", \"dispersion.k\": " << c.dispersion.k
     << ", \"dispersion.seed\": " << c.dispersion.seed
     << ", \"cl.tau\": " << c.tau << ", \"cl.sigma\": " << c.sigma
     << ", \"cl.seed\": " << c.cl_seed << ", \"cl.alpha_noise\": \""
     << (c.alpha_noise == AlphaNoise::kUniform01 ? "uniform01" : "centered")
     << "\", \"cl.grad_through_alpha\": "
     << (c.grad_through_alpha ? "true" : "false")
     << ", \"loss.lambda1\": " << c.lambda1
     << ", \"loss.lambda2\": " << c.lambda2
     << ", \"train.neg_samples\": " << c.neg_samples
     << ", \"estimator.kind\": \"" << to_string(c.estimator.kind)
     << "\", \"estimator.n\": " << c.estimator.n
     << ", \"estimator.h\": " << c.estimator.h
     << ", \"optim.lr\": " << c.lr << ", \"train.epochs\": " << c.epochs
     << ", \"train.batch_size\": " << c.batch_size
     << ", \"use_cl1\": " << (c.use_cl1 ? "true" : "false")
     << ", \"use_cl2\": " << (c.use_cl2 ? "true" : "false")
     << ", \"fix_alpha_one\": " << (c.fix_alpha_one ? "true" : "false") << "}";
  return os.str();
}

namespace {

constexpr char kCkptMagic[4] = {'B', 'G', 'C', 'K'};

struct AdjacencySets {
  std::vector<std::unordered_set<NodeId>> pos;  // per V1 node

  explicit AdjacencySets(const BipartiteGraph& g) : pos(g.n1) {
    for (const auto& [u, v] : g.edges) pos[u].insert(v);
  }
};

NodeId sample_negative(const AdjacencySets& adj, std::size_t n2, NodeId x,
                       SplitMix64& rng) {
  if (adj.pos[x].size() >= n2)
    throw std::runtime_error("train: node is connected to every candidate");
  for (;;) {
    NodeId v = static_cast<NodeId>(rng.next_u64() % n2);
    if (!adj.pos[x].count(v)) return v;
  }
}

// Map ViewGrads (keyed by batch position) back onto per-layer dL/dV and
// dL/d(alpha) node buffers, scaled by lambda1.
void fold_view_grads(const AugmentedViews& views, const ViewGrads& vg,
                     float lambda1, bool fold_alpha,
                     std::vector<Matrix>& layer_grads,
                     TableGrads& alpha_grads) {
  const std::size_t segs = views.segs();
  for (std::size_t b = 0; b < views.nodes.size(); ++b) {
    const std::size_t node = views.nodes[b];
    for (std::size_t l = 0; l < segs; ++l) {
      const std::size_t row = b * segs + l;
      float* dst = layer_grads[l].row(node);
      const float* g1 = vg.dv1.row(row);
      const float* g2 = vg.dv2.row(row);
      for (std::size_t i = 0; i < views.d; ++i)
        dst[i] += lambda1 * (g1[i] + g2[i]);
      if (fold_alpha)
        alpha_grads.alpha_at(node, l) +=
            lambda1 * (vg.da1[row] + vg.da2[row]);
    }
  }
}

}  // namespace

void save_checkpoint(const std::string& path, int epoch, const Matrix& v0,
                     const AdamOptimizer& opt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kCkptMagic, 4);
  std::uint64_t rows = v0.rows, cols = v0.cols;
  std::int32_t ep = epoch;
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  out.write(reinterpret_cast<const char*>(&ep), 4);
  out.write(reinterpret_cast<const char*>(v0.data.data()),
            v0.data.size() * sizeof(float));
  opt.save(out);
  if (!out) throw std::runtime_error("checkpoint write failure: " + path);
}

namespace {

int load_checkpoint(const std::string& path, Matrix& v0, AdamOptimizer& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCkptMagic, 4) != 0)
    throw std::runtime_error("bad checkpoint magic: " + path);
  std::uint64_t rows = 0, cols = 0;
  std::int32_t epoch = 0;
  in.read(reinterpret_cast<char*>(&rows), 8);
  in.read(reinterpret_cast<char*>(&cols), 8);
  in.read(reinterpret_cast<char*>(&epoch), 4);
  if (rows != v0.rows || cols != v0.cols)
    throw std::runtime_error("checkpoint shape mismatch: " + path);
  in.read(reinterpret_cast<char*>(v0.data.data()),
          v0.data.size() * sizeof(float));
  opt.load(in);
  return epoch;
}

}  // namespace

TrainResult train(const RunConfig& cfg, const BipartiteGraph& graph) {
  cfg.validate();
  const std::size_t n = graph.num_nodes();
  const NormalizedOperator op = normalize(graph);
  const AdjacencySets adj(graph);

  ModelConfig mcfg{cfg.d, cfg.layers, cfg.init_scale, cfg.seed};
  Matrix v0 = init_embeddings(n, mcfg);
  if (cfg.dispersion.enabled) v0 = disperse(v0, cfg.dispersion);

  AdamOptimizer opt(n, cfg.d, cfg.lr);
  int start_epoch = 0;
  if (!cfg.resume_from.empty())
    start_epoch = load_checkpoint(cfg.resume_from, v0, opt);

  TrainResult result;
  const std::size_t segs = static_cast<std::size_t>(cfg.layers) + 1;
  TableGrads grads(n, cfg.d, cfg.layers);

  for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    // derived from the epoch alone so a resumed run replays the same noise
    std::uint64_t global_step = static_cast<std::uint64_t>(epoch) * 1000000ULL;
    // epoch-indexed shuffling and negative sampling keep resume exact
    std::vector<std::size_t> order(graph.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 perm_rng(SplitMix64::mix(cfg.seed + 0x51ed, epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[perm_rng.next_u64() % i]);
    SplitMix64 neg_rng(SplitMix64::mix(cfg.seed + 0x4e39, epoch));

    EpochLog elog;
    elog.epoch = epoch;

    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + cfg.batch_size);

      std::vector<Triple> triples;
      triples.reserve((stop - start) * cfg.neg_samples);
      for (std::size_t k = start; k < stop; ++k) {
        const auto& [u, v] = graph.edges[order[k]];
        for (int s = 0; s < cfg.neg_samples; ++s)
          triples.push_back({u, v, sample_negative(adj, graph.n2, u, neg_rng)});
      }

      EmbeddingState state = forward(op, v0, mcfg);
      HashTable table = assemble(state, graph.n1, graph.n2);
      if (cfg.fix_alpha_one)
        std::fill(table.alphas.begin(), table.alphas.end(), 1.0f);

      grads.reset();
      const double l_bpr = bpr_loss(triples, table, grads);

      // distinct batch nodes per side, in first-seen order
      std::vector<std::size_t> users, items;
      {
        std::unordered_set<std::size_t> seen_u, seen_i;
        for (const Triple& t : triples) {
          if (seen_u.insert(t.x).second) users.push_back(t.x);
          if (seen_i.insert(t.y_pos).second)
            items.push_back(graph.n1 + t.y_pos);
        }
      }

      std::vector<Matrix> layer_grads(segs, Matrix(n, cfg.d));
      double l_cl1 = 0.0, l_cl2 = 0.0;
      if (cfg.lambda1 != 0.0f && (cfg.use_cl1 || cfg.use_cl2)) {
        int side = 0;
        for (const auto* nodes : {&users, &items}) {
          AugmentedViews views =
              make_views(state, table, *nodes, cfg.tau, cfg.cl_seed,
                         global_step * 2 + side, cfg.alpha_noise);
          ViewGrads vg(views);
          if (cfg.use_cl1) l_cl1 += cl_loss_continuous(views, cfg.sigma, vg);
          if (cfg.use_cl2 && !cfg.fix_alpha_one)
            l_cl2 += cl_loss_binary(views, table, cfg.sigma, vg);
          fold_view_grads(views, vg, cfg.lambda1,
                          cfg.grad_through_alpha && !cfg.fix_alpha_one,
                          layer_grads, grads);
          ++side;
        }
      }

      // batch-touched L2 regularization on layer-0 rows
      double l_reg = 0.0;
      {
        std::unordered_set<std::size_t> touched(users.begin(), users.end());
        touched.insert(items.begin(), items.end());
        for (const Triple& t : triples) {
          touched.insert(t.x);
          touched.insert(graph.n1 + t.y_pos);
          touched.insert(graph.n1 + t.y_neg);
        }
        for (std::size_t node : touched) {
          const float* row = v0.row(node);
          float* g0 = layer_grads[0].row(node);
          for (std::size_t i = 0; i < cfg.d; ++i) {
            l_reg += static_cast<double>(row[i]) * row[i];
            g0[i] += 2.0f * cfg.lambda2 * row[i];
          }
        }
      }

      // chain alpha and Q paths into the per-layer continuous gradients
      for (std::size_t l = 0; l < segs; ++l) {
        const Matrix& vl = state.layers[l];
        for (std::size_t node = 0; node < n; ++node) {
          const float* gq = grads.q_row(node, l);
          const float ga = grads.alpha_at(node, l);
          bool any = ga != 0.0f;
          if (!any)
            for (std::size_t i = 0; i < cfg.d; ++i)
              if (gq[i] != 0.0f) { any = true; break; }
          if (!any) continue;
          float* dst = layer_grads[l].row(node);
          const float* phi = vl.row(node);
          const float inv_d = 1.0f / static_cast<float>(cfg.d);
          for (std::size_t i = 0; i < cfg.d; ++i) {
            if (gq[i] != 0.0f)
              dst[i] += static_cast<float>(
                  sign_backward(phi[i], gq[i], cfg.estimator));
            // d(alpha)/dV_i = sign(V_i)/d; dead when alpha is pinned to 1
            if (ga != 0.0f && !cfg.fix_alpha_one)
              dst[i] += ga * sign_forward(phi[i]) * inv_d;
          }
        }
      }

      Matrix dv0 = backprop(op, std::move(layer_grads));
      LossBreakdown lb =
          total_loss(l_bpr, l_cl1, l_cl2, l_reg, cfg.lambda1, cfg.lambda2);
      opt.step(v0, dv0);

      elog.loss.bpr += lb.bpr;
      elog.loss.cl1 += lb.cl1;
      elog.loss.cl2 += lb.cl2;
      elog.loss.reg += lb.reg;
      elog.loss.total += lb.total;
      elog.triples += triples.size();
      ++global_step;
    }

    elog.bpr_per_triple =
        elog.triples ? elog.loss.bpr / static_cast<double>(elog.triples) : 0.0;
    result.log.push_back(elog);

    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() &&
        (epoch + 1) % cfg.checkpoint_every == 0)
      save_checkpoint(cfg.checkpoint_path, epoch + 1, v0, opt);
  }

  EmbeddingState state = forward(op, v0, mcfg);
  result.table = assemble(state, graph.n1, graph.n2);
  if (cfg.fix_alpha_one)
    std::fill(result.table.alphas.begin(), result.table.alphas.end(), 1.0f);
  result.v0 = std::move(v0);
  return result;
}

AblationVariant ablation_variant_from_string(const std::string& s) {
  if (s == "full") return AblationVariant::kFull;
  if (s == "no_cl1") return AblationVariant::kNoCl1;
  if (s == "no_cl2") return AblationVariant::kNoCl2;
  if (s == "no_cl") return AblationVariant::kNoCl;
  if (s == "no_rescale") return AblationVariant::kNoRescale;
  if (s == "ste") return AblationVariant::kSte;
  if (s == "tanh") return AblationVariant::kTanh;
  throw std::runtime_error("unknown ablation variant: " + s);
}

RunConfig apply_variant(RunConfig cfg, AblationVariant variant) {
  switch (variant) {
    case AblationVariant::kFull: break;
    case AblationVariant::kNoCl1: cfg.use_cl1 = false; break;
    case AblationVariant::kNoCl2: cfg.use_cl2 = false; break;
    case AblationVariant::kNoCl: cfg.lambda1 = 0.0f; break;
    case AblationVariant::kNoRescale: cfg.fix_alpha_one = true; break;
    case AblationVariant::kSte: cfg.estimator.kind = EstimatorKind::kSte; break;
    case AblationVariant::kTanh: cfg.estimator.kind = EstimatorKind::kTanh; break;
  }
  return cfg;
}

EvalReport evaluate_table(const HashTable& table, const BipartiteGraph& train,
                          const std::vector<std::pair<NodeId, NodeId>>& test,
                          const std::vector<std::size_t>& n_list) {
  HammingIndex index(table);
  std::vector<std::vector<NodeId>> truth(train.n1);
  for (const auto& [u, v] : test) truth[u].push_back(v);
  const std::size_t max_n =
      *std::max_element(n_list.begin(), n_list.end());

  std::vector<std::vector<NodeId>> results(train.n1);
  std::vector<std::vector<NodeId>> train_items(train.n1);
  for (const auto& [u, v] : train.edges) train_items[u].push_back(v);

  const std::int64_t n1 = static_cast<std::int64_t>(train.n1);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t xi = 0; xi < n1; ++xi) {
    const std::size_t x = static_cast<std::size_t>(xi);
    if (truth[x].empty()) continue;
    std::vector<bool> exclude(train.n2, false);
    for (NodeId v : train_items[x]) exclude[v] = true;
    TopNResult top = index.topn(table, x, max_n, exclude);
    results[x].reserve(top.items.size());
    for (const auto& [id, s] : top.items) results[x].push_back(id);
  }

  EvalReport report = recall_ndcg(results, truth, n_list);
  report.code_bits = table.num_nodes() * table.num_segments() *
                     (table.d + 32);
  report.float32_bits = 32 * table.num_nodes() * table.d * table.num_segments();
  report.ratio = static_cast<double>(report.float32_bits) / report.code_bits;
  return report;
}

AblationResult ablate(const RunConfig& cfg, AblationVariant variant,
                      const BipartiteGraph& graph, double split_ratio,
                      const std::vector<std::size_t>& n_list) {
  SplitResult sp = split(graph, split_ratio, cfg.seed);
  AblationResult out;
  {
    TrainResult full = train(cfg, sp.train);
    out.full = evaluate_table(full.table, sp.train, sp.test_edges, n_list);
  }
  {
    TrainResult var = train(apply_variant(cfg, variant), sp.train);
    out.variant = evaluate_table(var.table, sp.train, sp.test_edges, n_list);
  }
  return out;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for hashing: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

}  // namespace bgch
