#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>

#include "bgch/hamming_index.hpp"
#include "bgch/trainer.hpp"

namespace {

int log_level() {
  const char* env = std::getenv("BGCH_LOG");
  if (!env) return 1;
  std::string s(env);
  if (s == "quiet") return 0;
  if (s == "debug") return 2;
  return 1;
}

void write_manifest(const bgch::RunConfig& cfg, const std::string& path) {
  std::ostringstream os;
  os << "{\"config\": " << to_json(cfg);
  if (!cfg.train_path.empty()) {
    os << ", \"input\": \"" << cfg.train_path << "\", \"input_fnv1a\": \""
       << std::hex << bgch::fnv1a_file(cfg.train_path) << std::dec << "\"";
  }
  os << "}\n";
  std::ofstream out(path);
  out << os.str();
}

std::vector<std::size_t> parse_n_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoull(tok));
  if (out.empty()) throw std::runtime_error("empty --topn list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bipartite graph convolutional hashing: train binary node "
               "codes and serve Top-N retrieval in Hamming space"};
  app.require_subcommand(1);

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "train a model and export the hash table");
  std::string config_path, override_str;
  std::vector<std::string> overrides;
  std::string train_data, out_table, ckpt_path, resume_path;
  train_cmd->add_option("--config", config_path, "key=value config file");
  train_cmd->add_option("--set", overrides, "config override key=value (repeatable)");
  train_cmd->add_option("--data", train_data, "training edge list");
  train_cmd->add_option("--out", out_table, "output hash table file");
  train_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file path");
  train_cmd->add_option("--resume", resume_path, "resume from checkpoint");
  std::string manifest_path;
  train_cmd->add_option("--manifest", manifest_path, "run manifest path (default: <out>.run.json)");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a hash table against held-out edges");
  std::string eval_index, eval_train, eval_test, eval_topn = "20,50,100";
  std::string eval_format = "json";
  eval_cmd->add_option("--index", eval_index, "hash table file")->required();
  eval_cmd->add_option("--train", eval_train, "training edge list (for exclusion)")->required();
  eval_cmd->add_option("--test", eval_test, "held-out edge list")->required();
  eval_cmd->add_option("--topn", eval_topn, "comma-separated N list");
  eval_cmd->add_option("--format", eval_format, "json or tsv");

  // ---- query ----
  auto* query_cmd = app.add_subcommand("query", "Top-N nearest V2 nodes for a query node");
  std::string q_index, q_exclude;
  std::size_t q_node = 0, q_topn = 10;
  query_cmd->add_option("--index", q_index, "hash table file")->required();
  query_cmd->add_option("--node", q_node, "V1 query node id")->required();
  query_cmd->add_option("--topn", q_topn, "result count");
  query_cmd->add_option("--exclude", q_exclude, "edge list of pairs to exclude");

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand("bench", "popcount vs float32 scoring benchmark");
  std::string b_index;
  std::size_t b_queries = 1000, b_topn = 10;
  std::uint64_t b_seed = 1;
  bench_cmd->add_option("--index", b_index, "hash table file")->required();
  bench_cmd->add_option("--queries", b_queries, "number of queries");
  bench_cmd->add_option("--topn", b_topn, "result count");
  bench_cmd->add_option("--seed", b_seed, "query sampling seed");

  // ---- ablate ----
  auto* ablate_cmd = app.add_subcommand("ablate", "train full model and a variant, report both");
  std::string a_config, a_data, a_variant = "no_cl", a_topn = "20";
  std::vector<std::string> a_overrides;
  double a_split = 0.2;
  ablate_cmd->add_option("--config", a_config, "key=value config file");
  ablate_cmd->add_option("--set", a_overrides, "config override (repeatable)");
  ablate_cmd->add_option("--data", a_data, "edge list")->required();
  ablate_cmd->add_option("--variant", a_variant,
                         "full|no_cl1|no_cl2|no_cl|no_rescale|ste|tanh");
  ablate_cmd->add_option("--split", a_split, "test holdout ratio");
  ablate_cmd->add_option("--topn", a_topn, "comma-separated N list");

  // ---- export ----
  auto* export_cmd = app.add_subcommand("export", "rebuild a hash table from a checkpoint");
  std::string e_config, e_data, e_ckpt, e_out;
  std::vector<std::string> e_overrides;
  export_cmd->add_option("--config", e_config, "key=value config file");
  export_cmd->add_option("--set", e_overrides, "config override (repeatable)");
  export_cmd->add_option("--data", e_data, "edge list the checkpoint was trained on")->required();
  export_cmd->add_option("--from", e_ckpt, "checkpoint file")->required();
  export_cmd->add_option("--out", e_out, "output hash table file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      bgch::RunConfig cfg;
      if (!config_path.empty()) cfg = bgch::parse_config_file(config_path);
      for (const auto& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw std::runtime_error("--set expects key=value, got: " + kv);
        bgch::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!train_data.empty()) cfg.train_path = train_data;
      if (!out_table.empty()) cfg.output_table = out_table;
      if (!ckpt_path.empty()) cfg.checkpoint_path = ckpt_path;
      if (!resume_path.empty()) cfg.resume_from = resume_path;
      cfg.validate();
      if (cfg.train_path.empty())
        throw std::runtime_error("train: no dataset (use --data or data.train)");
      if (cfg.output_table.empty())
        throw std::runtime_error("train: no output (use --out or out.table)");

      bgch::BipartiteGraph graph = bgch::load_edge_list(cfg.train_path);
      if (log_level() >= 1 && graph.duplicates_dropped > 0)
        std::cerr << "warning: dropped " << graph.duplicates_dropped
                  << " duplicate edges\n";
      if (manifest_path.empty()) manifest_path = cfg.output_table + ".run.json";
      write_manifest(cfg, manifest_path);

      bgch::TrainResult result = bgch::train(cfg, graph);
      for (const auto& e : result.log) {
        if (log_level() >= 1 && (e.epoch % std::max(1, cfg.log_every) == 0))
          std::cerr << "epoch " << e.epoch << " total=" << e.loss.total
                    << " bpr=" << e.loss.bpr << " cl1=" << e.loss.cl1
                    << " cl2=" << e.loss.cl2 << " reg=" << e.loss.reg
                    << " bpr/triple=" << e.bpr_per_triple << "\n";
      }
      bgch::save_hash_table(result.table, cfg.output_table);
      if (log_level() >= 1)
        std::cerr << "wrote " << cfg.output_table << "\n";
    } else if (*eval_cmd) {
      bgch::HashTable table = bgch::load_hash_table(eval_index);
      bgch::BipartiteGraph train = bgch::load_edge_list(eval_train);
      bgch::BipartiteGraph test = bgch::load_edge_list(eval_test);
      bgch::EvalReport report = bgch::evaluate_table(
          table, train, test.edges, parse_n_list(eval_topn));
      std::cout << (eval_format == "tsv" ? to_tsv(report) : to_json(report))
                << "\n";
    } else if (*query_cmd) {
      bgch::HashTable table = bgch::load_hash_table(q_index);
      if (q_node >= table.n1)
        throw std::runtime_error("query: node id out of V1 range");
      std::vector<bool> exclude;
      if (!q_exclude.empty()) {
        bgch::BipartiteGraph ex = bgch::load_edge_list(q_exclude);
        exclude.assign(table.n2, false);
        for (const auto& [u, v] : ex.edges)
          if (u == q_node) exclude[v] = true;
      }
      bgch::HammingIndex index(table);
      bgch::TopNResult top = index.topn(table, q_node, q_topn, exclude);
      for (std::size_t r = 0; r < top.items.size(); ++r)
        std::cout << (r + 1) << "\t" << top.items[r].first << "\t"
                  << top.items[r].second << "\n";
    } else if (*bench_cmd) {
      bgch::HashTable table = bgch::load_hash_table(b_index);
      bgch::HammingIndex index(table);
      std::cout << to_json(bgch::bench(index, table, b_queries, b_topn, b_seed))
                << "\n";
    } else if (*ablate_cmd) {
      bgch::RunConfig cfg;
      if (!a_config.empty()) cfg = bgch::parse_config_file(a_config);
      for (const auto& kv : a_overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw std::runtime_error("--set expects key=value, got: " + kv);
        bgch::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      cfg.validate();
      bgch::BipartiteGraph graph = bgch::load_edge_list(a_data);
      bgch::AblationResult res =
          bgch::ablate(cfg, bgch::ablation_variant_from_string(a_variant),
                       graph, a_split, parse_n_list(a_topn));
      std::cout << "{\"full\": " << to_json(res.full)
                << ", \"" << a_variant << "\": " << to_json(res.variant)
                << "}\n";
    } else if (*export_cmd) {
      bgch::RunConfig cfg;
      if (!e_config.empty()) cfg = bgch::parse_config_file(e_config);
      for (const auto& kv : e_overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw std::runtime_error("--set expects key=value, got: " + kv);
        bgch::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      cfg.validate();
      cfg.resume_from = e_ckpt;
      cfg.epochs = 0;  // no further steps, just rebuild the table
      bgch::BipartiteGraph graph = bgch::load_edge_list(e_data);
      // resume with epochs=0 short-circuits the loop and assembles from the
      // checkpointed embeddings
      bgch::RunConfig export_cfg = cfg;
      bgch::TrainResult result = bgch::train(export_cfg, graph);
      bgch::save_hash_table(result.table, e_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
