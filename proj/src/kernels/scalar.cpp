#include "variants.hpp"

#include <cmath>

namespace dcmm::kernels::scalar_impl {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double weighted_l1(const double* w, const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::fabs(x[i] - y[i]);
  return s;
}

void adjacency_matvec(const std::uint64_t* row_ptr, const std::uint32_t* cols, std::size_t n,
                      const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::uint64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += x[cols[k]];
    y[i] = s;
  }
}

}  // namespace dcmm::kernels::scalar_impl
