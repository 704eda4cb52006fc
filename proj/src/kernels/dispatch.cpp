#include <cstdlib>
#include <stdexcept>
#include <string>

#include "rejective/kernels.hpp"

namespace rejective::kernels {

#if defined(__x86_64__) || defined(_M_X64)
#define REJECTIVE_HAVE_AVX2_KERNELS 1
extern const KernelTable kAvx2Kernels;
#endif

#if defined(__aarch64__)
#define REJECTIVE_HAVE_NEON_KERNELS 1
extern const KernelTable kNeonKernels;
#endif

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#ifdef REJECTIVE_HAVE_AVX2_KERNELS
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#ifdef REJECTIVE_HAVE_NEON_KERNELS
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel variant '" + std::string(to_string(isa)) +
                                "' is not available on this machine");
  }
  switch (isa) {
#ifdef REJECTIVE_HAVE_AVX2_KERNELS
    case Isa::Avx2: return kAvx2Kernels;
#endif
#ifdef REJECTIVE_HAVE_NEON_KERNELS
    case Isa::Neon: return kNeonKernels;
#endif
    default: return scalar_kernels();
  }
}

namespace {

const KernelTable& select_kernels() noexcept {
  if (const char* forced = std::getenv("ENTROPY_SAMPLER_ISA")) {
    const std::string_view name(forced);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == to_string(isa) && isa_available(isa)) return kernels_for(isa);
    }
  }
  if (isa_available(Isa::Avx2)) return kernels_for(Isa::Avx2);
  if (isa_available(Isa::Neon)) return kernels_for(Isa::Neon);
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = select_kernels();
  return table;
}

}  // namespace rejective::kernels
