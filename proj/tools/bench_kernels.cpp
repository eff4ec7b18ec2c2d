// Compares the OpenMP kernels against their serial reference
// implementations: sparse propagation and hash-table assembly.
#include <chrono>
#include <cstring>
#include <iostream>

#include "bgch/eval.hpp"
#include "bgch/graph.hpp"
#include "bgch/hash_model.hpp"
#include "bgch/rng.hpp"

using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t blocks = 8, npb = 64, d = 256;
  int reps = 20;
  if (argc > 1) npb = std::stoull(argv[1]);
  if (argc > 2) d = std::stoull(argv[2]);
  if (argc > 3) reps = std::stoi(argv[3]);

  bgch::BipartiteGraph graph =
      bgch::planted_graph(blocks, npb, 0.2, 0.01, 99);
  bgch::NormalizedOperator op = bgch::normalize(graph);
  const std::size_t n = graph.num_nodes();
  std::cout << "graph: " << n << " nodes, " << graph.edges.size()
            << " edges, d=" << d << ", reps=" << reps << "\n";

  bgch::Matrix v(n, d);
  bgch::SplitMix64 rng(7);
  for (auto& x : v.data) x = static_cast<float>(rng.next_normal());

  bgch::Matrix out_serial, out_parallel;
  auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) bgch::propagate_serial(op, v, out_serial);
  const double serial_ms = ms_since(t0) / reps;
  t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) bgch::propagate(op, v, out_parallel);
  const double parallel_ms = ms_since(t0) / reps;

  const bool identical =
      std::memcmp(out_serial.data.data(), out_parallel.data.data(),
                  out_serial.data.size() * sizeof(float)) == 0;
  std::cout << "propagate: serial " << serial_ms << " ms, parallel "
            << parallel_ms << " ms, speedup " << serial_ms / parallel_ms
            << ", bit-identical: " << (identical ? "yes" : "NO") << "\n";

  bgch::ModelConfig cfg{d, 2, 0.1f, 1};
  bgch::EmbeddingState state = bgch::forward(op, v, cfg);
  t0 = clock_type::now();
  for (int r = 0; r < reps; ++r)
    bgch::assemble(state, graph.n1, graph.n2);
  std::cout << "assemble: " << ms_since(t0) / reps << " ms per call\n";
  return identical ? 0 : 1;
}
