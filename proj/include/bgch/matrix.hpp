#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace bgch {

// Dense row-major float32 matrix. All continuous model math runs on these;
// float64 is reserved for test oracles and score accumulation.
struct Matrix {
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

  float* row(std::size_t i) {
    assert(i < rows);
    return data.data() + i * cols;
  }
  const float* row(std::size_t i) const {
    assert(i < rows);
    return data.data() + i * cols;
  }
  float& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  float at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  void fill(float v) { std::fill(data.begin(), data.end(), v); }

  bool same_shape(const Matrix& o) const {
    return rows == o.rows && cols == o.cols;
  }
};

}  // namespace bgch
