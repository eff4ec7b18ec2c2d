#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bgch/graph.hpp"
#include "bgch/matrix.hpp"

namespace bgch {

struct ModelConfig {
  std::size_t d{64};
  int layers{2};  // L, number of propagation layers
  float init_scale{0.1f};
  std::uint64_t seed{42};
};

// V^(0..L); layers[l+1] = A_hat * layers[l].
struct EmbeddingState {
  std::vector<Matrix> layers;
  int num_layers() const { return static_cast<int>(layers.size()) - 1; }
};

inline std::size_t words_per_code(std::size_t d) { return (d + 63) / 64; }

// Per-node, per-layer sign codes (bit-packed, bit=1 <=> +1) and rescaling
// factors alpha = ||V||_1 / d. Immutable once assembled.
struct HashTable {
  std::size_t n1{0};
  std::size_t n2{0};
  std::size_t d{0};
  int layers{0};  // L; the table holds L+1 segments

  std::vector<float> alphas;        // node-major, (L+1) per node
  std::vector<std::uint64_t> codes; // node-major, (L+1)*words per node

  std::size_t num_nodes() const { return n1 + n2; }
  std::size_t num_segments() const { return static_cast<std::size_t>(layers) + 1; }
  std::size_t words() const { return words_per_code(d); }

  float alpha(std::size_t node, std::size_t layer) const {
    return alphas[node * num_segments() + layer];
  }
  float& alpha(std::size_t node, std::size_t layer) {
    return alphas[node * num_segments() + layer];
  }
  const std::uint64_t* code(std::size_t node, std::size_t layer) const {
    return codes.data() + (node * num_segments() + layer) * words();
  }
  std::uint64_t* code(std::size_t node, std::size_t layer) {
    return codes.data() + (node * num_segments() + layer) * words();
  }
  // +1/-1 at bit position i
  int code_bit(std::size_t node, std::size_t layer, std::size_t i) const {
    return (code(node, layer)[i / 64] >> (i % 64)) & 1u ? +1 : -1;
  }
};

Matrix init_embeddings(std::size_t n, const ModelConfig& cfg);

// Fills layers 0..L by repeated propagation; layer 0 is v0 as given
// (post-dispersion when enabled). Throws on non-finite values.
EmbeddingState forward(const NormalizedOperator& op, Matrix v0,
                       const ModelConfig& cfg);

// code[i] = +1 iff row[i] >= 0; alpha = ||row||_1 / d.
// Packs little-endian within 64-bit words: bit j of word w = dimension 64w+j.
void hash_layer(const float* row, std::size_t d, std::uint64_t* code_out,
                float& alpha_out);

HashTable assemble(const EmbeddingState& state, std::size_t n1, std::size_t n2);

// Binary format (little-endian): magic "BGCH", version u32, n1 u64, n2 u64,
// d u32, L u32, then per node: (L+1) f32 alphas, (L+1)*ceil(d/64) u64 words.
void save_hash_table(const HashTable& table, const std::string& path);
HashTable load_hash_table(const std::string& path);
std::size_t serialized_size_bytes(const HashTable& table);

}  // namespace bgch
