// aarch64 always has Advanced SIMD; no extra flags needed.

#include "variants.hpp"

#include <arm_neon.h>

#include <cmath>

namespace dcmm::kernels::neon_impl {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), a, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double weighted_l1(const double* w, const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(w + i), vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    acc1 = vfmaq_f64(acc1, vld1q_f64(w + i + 2),
                     vabdq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += w[i] * std::fabs(x[i] - y[i]);
  return s;
}

void adjacency_matvec(const std::uint64_t* row_ptr, const std::uint32_t* cols, std::size_t n,
                      const double* x, double* y) {
  // No gather on NEON; two independent accumulators still break the add chain.
  for (std::size_t i = 0; i < n; ++i) {
    double s0 = 0.0, s1 = 0.0;
    std::uint64_t k = row_ptr[i];
    const std::uint64_t end = row_ptr[i + 1];
    for (; k + 2 <= end; k += 2) {
      s0 += x[cols[k]];
      s1 += x[cols[k + 1]];
    }
    if (k < end) s0 += x[cols[k]];
    y[i] = s0 + s1;
  }
}

}  // namespace dcmm::kernels::neon_impl
