#include "linalg.hpp"

#include <cstring>

// Register-blocked kernels tuned for the shapes this engine actually
// runs: batch rows of a few hundred against 100x100-ish weight panels.
// This translation unit is compiled with relaxed FP so the reductions
// vectorize; results are deterministic within a build.

namespace erc {

double dot(const double* __restrict a, const double* __restrict b,
           std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void gemm_nn(const double* __restrict a, std::size_t n, std::size_t k,
             const double* __restrict b, std::size_t m, double* __restrict c) {
  std::memset(c, 0, n * m * sizeof(double));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* a0 = a + i * k;
    const double* a1 = a0 + k;
    const double* a2 = a1 + k;
    const double* a3 = a2 + k;
    double* c0 = c + i * m;
    double* c1 = c0 + m;
    double* c2 = c1 + m;
    double* c3 = c2 + m;
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
      const double* b0 = b + p * m;
      const double* b1 = b0 + m;
      const double* b2 = b1 + m;
      const double* b3 = b2 + m;
      for (std::size_t j = 0; j < m; ++j) {
        const double u0 = b0[j], u1 = b1[j], u2 = b2[j], u3 = b3[j];
        c0[j] += a0[p] * u0 + a0[p + 1] * u1 + a0[p + 2] * u2 + a0[p + 3] * u3;
        c1[j] += a1[p] * u0 + a1[p + 1] * u1 + a1[p + 2] * u2 + a1[p + 3] * u3;
        c2[j] += a2[p] * u0 + a2[p + 1] * u1 + a2[p + 2] * u2 + a2[p + 3] * u3;
        c3[j] += a3[p] * u0 + a3[p + 1] * u1 + a3[p + 2] * u2 + a3[p + 3] * u3;
      }
    }
    for (; p < k; ++p) {
      const double* bp = b + p * m;
      const double x0 = a0[p], x1 = a1[p], x2 = a2[p], x3 = a3[p];
      for (std::size_t j = 0; j < m; ++j) {
        const double bj = bp[j];
        c0[j] += x0 * bj;
        c1[j] += x1 * bj;
        c2[j] += x2 * bj;
        c3[j] += x3 * bj;
      }
    }
  }
  for (; i < n; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double x = ai[p];
      const double* bp = b + p * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += x * bp[j];
    }
  }
}

void gemm_nt(const double* __restrict a, std::size_t n, std::size_t k,
             const double* __restrict b, std::size_t m, double* __restrict c) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* a0 = a + i * k;
    const double* a1 = a0 + k;
    const double* a2 = a1 + k;
    const double* a3 = a2 + k;
    std::size_t j = 0;
    for (; j + 2 <= m; j += 2) {
      const double* bj = b + j * k;
      const double* bk = bj + k;
      double s00 = 0, s01 = 0, s10 = 0, s11 = 0;
      double s20 = 0, s21 = 0, s30 = 0, s31 = 0;
      for (std::size_t p = 0; p < k; ++p) {
        const double u = bj[p], v = bk[p];
        s00 += a0[p] * u;
        s01 += a0[p] * v;
        s10 += a1[p] * u;
        s11 += a1[p] * v;
        s20 += a2[p] * u;
        s21 += a2[p] * v;
        s30 += a3[p] * u;
        s31 += a3[p] * v;
      }
      c[(i + 0) * m + j] = s00;
      c[(i + 0) * m + j + 1] = s01;
      c[(i + 1) * m + j] = s10;
      c[(i + 1) * m + j + 1] = s11;
      c[(i + 2) * m + j] = s20;
      c[(i + 2) * m + j + 1] = s21;
      c[(i + 3) * m + j] = s30;
      c[(i + 3) * m + j + 1] = s31;
    }
    for (; j < m; ++j) {
      const double* bj = b + j * k;
      c[(i + 0) * m + j] = dot(a0, bj, k);
      c[(i + 1) * m + j] = dot(a1, bj, k);
      c[(i + 2) * m + j] = dot(a2, bj, k);
      c[(i + 3) * m + j] = dot(a3, bj, k);
    }
  }
  for (; i < n; ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * m;
    for (std::size_t j = 0; j < m; ++j) ci[j] = dot(ai, b + j * k, k);
  }
}

void gemm_tn_acc(const double* __restrict a, std::size_t n, std::size_t j,
                 const double* __restrict b, std::size_t k,
                 double* __restrict c) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* a0 = a + i * j;
    const double* a1 = a0 + j;
    const double* a2 = a1 + j;
    const double* a3 = a2 + j;
    const double* b0 = b + i * k;
    const double* b1 = b0 + k;
    const double* b2 = b1 + k;
    const double* b3 = b2 + k;
    for (std::size_t p = 0; p < j; ++p) {
      const double x0 = a0[p], x1 = a1[p], x2 = a2[p], x3 = a3[p];
      if (x0 == 0.0 && x1 == 0.0 && x2 == 0.0 && x3 == 0.0) continue;
      double* cp = c + p * k;
      for (std::size_t q = 0; q < k; ++q)
        cp[q] += x0 * b0[q] + x1 * b1[q] + x2 * b2[q] + x3 * b3[q];
    }
  }
  for (; i < n; ++i) {
    const double* ai = a + i * j;
    const double* bi = b + i * k;
    for (std::size_t p = 0; p < j; ++p) {
      const double ap = ai[p];
      if (ap == 0.0) continue;
      double* cp = c + p * k;
      for (std::size_t q = 0; q < k; ++q) cp[q] += ap * bi[q];
    }
  }
}

}  // namespace erc
