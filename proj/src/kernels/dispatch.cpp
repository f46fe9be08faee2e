#include "dcmm/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "variants.hpp"

namespace dcmm::kernels {
namespace {

constexpr KernelTable kScalar{Isa::scalar, scalar_impl::dot, scalar_impl::axpy,
                              scalar_impl::weighted_l1, scalar_impl::adjacency_matvec};
#if defined(DCMM_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, avx2_impl::dot, avx2_impl::axpy, avx2_impl::weighted_l1,
                            avx2_impl::adjacency_matvec};
#endif
#if defined(DCMM_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, neon_impl::dot, neon_impl::axpy, neon_impl::weighted_l1,
                            neon_impl::adjacency_matvec};
#endif

bool cpu_has_avx2() {
#if defined(DCMM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("DCMM_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && supported(Isa::avx2)) return Isa::avx2;
    if (want == "neon" && supported(Isa::neon)) return Isa::neon;
  }
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{&table(detect())};
  return ptr;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: {
      static const bool ok = cpu_has_avx2();
      return ok;
    }
    case Isa::neon:
#if defined(DCMM_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa))
    throw std::invalid_argument("kernel variant not available: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(DCMM_HAVE_AVX2)
    case Isa::avx2: return kAvx2;
#endif
#if defined(DCMM_HAVE_NEON)
    case Isa::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void force_isa(Isa isa) { current().store(&table(isa), std::memory_order_release); }

}  // namespace dcmm::kernels
