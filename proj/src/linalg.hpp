#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace erc {

// Dense row-major matrix of doubles. resize() keeps capacity so the
// training hot loop does not reallocate.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  // Cheap when the shape is unchanged: contents are left as-is and the
  // callers overwrite them. Shape changes zero-fill.
  void resize(std::size_t r, std::size_t c) {
    if (r == rows && c == cols) return;
    rows = r;
    cols = c;
    data.assign(r * c, 0.0);
  }
  void zero() { data.assign(data.size(), 0.0); }
};

// C = A * B          A: n x k, B: k x m, C: n x m (overwritten)
void gemm_nn(const double* a, std::size_t n, std::size_t k, const double* b,
             std::size_t m, double* c);

// C = A * B^T        A: n x k, B: m x k, C: n x m (overwritten)
void gemm_nt(const double* a, std::size_t n, std::size_t k, const double* b,
             std::size_t m, double* c);

// C += A^T * B       A: n x j, B: n x k, C: j x k (accumulated)
void gemm_tn_acc(const double* a, std::size_t n, std::size_t j,
                 const double* b, std::size_t k, double* c);

double dot(const double* a, const double* b, std::size_t n);

// Inline so it picks up the strict FP flags of the calling translation
// unit (the gemm TU itself is built with relaxed math).
inline bool all_finite(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

}  // namespace erc
