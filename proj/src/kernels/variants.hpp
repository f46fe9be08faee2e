#pragma once

// Internal: per-ISA kernel symbols. Each namespace is defined in its own
// translation unit so that ISA-specific code generation never leaks into
// inline functions shared with the baseline build.

#include <cstddef>
#include <cstdint>

#define DCMM_KERNEL_DECLS                                                                  \
  double dot(const double* x, const double* y, std::size_t n);                             \
  void axpy(double alpha, const double* x, double* y, std::size_t n);                      \
  double weighted_l1(const double* w, const double* x, const double* y, std::size_t n);    \
  void adjacency_matvec(const std::uint64_t* row_ptr, const std::uint32_t* cols,           \
                        std::size_t n, const double* x, double* y);

namespace dcmm::kernels::scalar_impl {
DCMM_KERNEL_DECLS
}
namespace dcmm::kernels::avx2_impl {
DCMM_KERNEL_DECLS
}
namespace dcmm::kernels::neon_impl {
DCMM_KERNEL_DECLS
}

#undef DCMM_KERNEL_DECLS
