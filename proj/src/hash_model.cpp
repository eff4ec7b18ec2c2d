#include "bgch/hash_model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "bgch/rng.hpp"

namespace bgch {

Matrix init_embeddings(std::size_t n, const ModelConfig& cfg) {
  Matrix v0(n, cfg.d);
  SplitMix64 rng(cfg.seed);
  for (auto& x : v0.data)
    x = static_cast<float>(rng.next_normal()) * cfg.init_scale;
  return v0;
}

EmbeddingState forward(const NormalizedOperator& op, Matrix v0,
                       const ModelConfig& cfg) {
  if (v0.rows != op.n) throw std::runtime_error("forward: shape mismatch");
  EmbeddingState state;
  state.layers.reserve(cfg.layers + 1);
  state.layers.push_back(std::move(v0));
  for (int l = 0; l < cfg.layers; ++l)
    state.layers.push_back(propagate(op, state.layers.back()));
  for (const auto& layer : state.layers)
    for (float x : layer.data)
      if (!std::isfinite(x))
        throw std::runtime_error("forward: non-finite embedding value");
  return state;
}

void hash_layer(const float* row, std::size_t d, std::uint64_t* code_out,
                float& alpha_out) {
  const std::size_t w = words_per_code(d);
  std::memset(code_out, 0, w * sizeof(std::uint64_t));
  float l1 = 0.0f;
  for (std::size_t i = 0; i < d; ++i) {
    if (row[i] >= 0.0f) code_out[i / 64] |= (1ULL << (i % 64));
    l1 += std::fabs(row[i]);
  }
  alpha_out = l1 / static_cast<float>(d);
}

HashTable assemble(const EmbeddingState& state, std::size_t n1,
                   std::size_t n2) {
  HashTable t;
  t.n1 = n1;
  t.n2 = n2;
  t.layers = state.num_layers();
  t.d = state.layers[0].cols;
  const std::size_t n = n1 + n2;
  const std::size_t segs = t.num_segments();
  t.alphas.assign(n * segs, 0.0f);
  t.codes.assign(n * segs * t.words(), 0);
  const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t x = 0; x < nn; ++x) {
    for (std::size_t l = 0; l < segs; ++l) {
      hash_layer(state.layers[l].row(static_cast<std::size_t>(x)), t.d,
                 t.code(static_cast<std::size_t>(x), l),
                 t.alpha(static_cast<std::size_t>(x), l));
    }
  }
  return t;
}

namespace {

constexpr char kMagic[4] = {'B', 'G', 'C', 'H'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

std::size_t serialized_size_bytes(const HashTable& t) {
  const std::size_t header = 4 + 4 + 8 + 8 + 4 + 4;
  const std::size_t per_node =
      t.num_segments() * sizeof(float) + t.num_segments() * t.words() * 8;
  return header + t.num_nodes() * per_node;
}

void save_hash_table(const HashTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write hash table: " + path);
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(t.n1));
  write_pod(out, static_cast<std::uint64_t>(t.n2));
  write_pod(out, static_cast<std::uint32_t>(t.d));
  write_pod(out, static_cast<std::uint32_t>(t.layers));
  const std::size_t segs = t.num_segments();
  for (std::size_t x = 0; x < t.num_nodes(); ++x) {
    out.write(reinterpret_cast<const char*>(&t.alphas[x * segs]),
              segs * sizeof(float));
    out.write(reinterpret_cast<const char*>(
                  t.codes.data() + x * segs * t.words()),
              segs * t.words() * sizeof(std::uint64_t));
  }
  if (!out) throw std::runtime_error("write failure: " + path);
}

HashTable load_hash_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open hash table: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("bad magic in hash table: " + path);
  std::uint32_t version = 0;
  read_pod(in, version);
  if (version != kVersion)
    throw std::runtime_error("unsupported hash table version");
  std::uint64_t n1 = 0, n2 = 0;
  std::uint32_t d = 0, layers = 0;
  read_pod(in, n1);
  read_pod(in, n2);
  read_pod(in, d);
  read_pod(in, layers);

  HashTable t;
  t.n1 = n1;
  t.n2 = n2;
  t.d = d;
  t.layers = static_cast<int>(layers);
  const std::size_t segs = t.num_segments();
  t.alphas.resize(t.num_nodes() * segs);
  t.codes.resize(t.num_nodes() * segs * t.words());
  for (std::size_t x = 0; x < t.num_nodes(); ++x) {
    in.read(reinterpret_cast<char*>(&t.alphas[x * segs]),
            segs * sizeof(float));
    in.read(reinterpret_cast<char*>(t.codes.data() + x * segs * t.words()),
            segs * t.words() * sizeof(std::uint64_t));
  }
  if (!in) throw std::runtime_error("truncated hash table: " + path);
  return t;
}

}  // namespace bgch
