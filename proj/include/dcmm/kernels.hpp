#pragma once

// Data-parallel inner loops shared by the estimator and the loss code.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// picked once at startup from the CPU feature bits; DCMM_ISA=scalar in the
// environment (or force_isa) pins the reference path.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace dcmm::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // sum_i w[i] * |x[i] - y[i]|
  double (*weighted_l1)(const double* w, const double* x, const double* y, std::size_t n);
  // y[i] = sum_{k in [row_ptr[i], row_ptr[i+1])} x[cols[k]]; 0/1 adjacency in CSR form
  void (*adjacency_matvec)(const std::uint64_t* row_ptr, const std::uint32_t* cols,
                           std::size_t n, const double* x, double* y);
};

// True when the variant is compiled in and the running CPU can execute it.
bool supported(Isa isa);

// Table for a specific variant. Throws std::invalid_argument if unsupported.
const KernelTable& table(Isa isa);

// Table selected for this process.
const KernelTable& active();

// Overrides the runtime choice (tests and benchmarking).
void force_isa(Isa isa);

}  // namespace dcmm::kernels
