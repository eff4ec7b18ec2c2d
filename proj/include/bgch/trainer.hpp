#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bgch/augmentation.hpp"
#include "bgch/dispersion.hpp"
#include "bgch/estimator.hpp"
#include "bgch/eval.hpp"
#include "bgch/graph.hpp"
#include "bgch/hash_model.hpp"
#include "bgch/objective.hpp"

namespace bgch {

struct RunConfig {
  // model
  std::size_t d{64};
  int layers{2};
  float init_scale{0.1f};
  std::uint64_t seed{42};

  DispersionConfig dispersion;

  // contrastive learning
  float tau{0.1f};
  float sigma{0.2f};
  std::uint64_t cl_seed{7};
  AlphaNoise alpha_noise{AlphaNoise::kUniform01};
  bool grad_through_alpha{true};

  // losses
  float lambda1{5e-2f};
  float lambda2{1e-5f};
  int neg_samples{1};

  EstimatorConfig estimator;

  // optimizer / loop
  float lr{1e-3f};
  int epochs{30};
  std::size_t batch_size{256};
  int log_every{1};
  int checkpoint_every{0};  // 0 = only on demand

  // ablation switches
  bool use_cl1{true};
  bool use_cl2{true};
  bool fix_alpha_one{false};

  // paths
  std::string train_path;
  std::string output_table;
  std::string checkpoint_path;
  std::string resume_from;

  void validate() const;
};

// flat key=value text; '#' comments. Unknown keys are an error.
RunConfig parse_config_file(const std::string& path);
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);
std::string to_json(const RunConfig& cfg);

struct EpochLog {
  int epoch{0};
  LossBreakdown loss;       // sums over the epoch
  std::size_t triples{0};
  double bpr_per_triple{0.0};
};

struct TrainResult {
  HashTable table;
  Matrix v0;
  std::vector<EpochLog> log;
};

TrainResult train(const RunConfig& cfg, const BipartiteGraph& graph);

// checkpoint = epoch counter + V0 + Adam state; resuming reproduces the
// uninterrupted trajectory exactly
void save_checkpoint(const std::string& path, int epoch, const Matrix& v0,
                     const AdamOptimizer& opt);

enum class AblationVariant {
  kFull, kNoCl1, kNoCl2, kNoCl, kNoRescale, kSte, kTanh
};
AblationVariant ablation_variant_from_string(const std::string& s);
RunConfig apply_variant(RunConfig cfg, AblationVariant variant);

struct AblationResult {
  EvalReport full;
  EvalReport variant;
};

AblationResult ablate(const RunConfig& cfg, AblationVariant variant,
                      const BipartiteGraph& graph, double split_ratio,
                      const std::vector<std::size_t>& n_list);

// Ranks every V1 query against all V2 candidates with the train-edge
// exclusion applied, then computes Recall/NDCG against the held-out edges.
EvalReport evaluate_table(const HashTable& table, const BipartiteGraph& train,
                          const std::vector<std::pair<NodeId, NodeId>>& test,
                          const std::vector<std::size_t>& n_list);

std::uint64_t fnv1a_file(const std::string& path);

}  // namespace bgch
