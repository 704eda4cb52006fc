#pragma once

// Inner loops shared by every exact probability computation. Each kernel has
// a scalar reference and SIMD variants that are required to produce
// bit-identical results (no reassociation, no FMA contraction).

#include <cstddef>
#include <span>
#include <string_view>

namespace rejective::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;

  // One step of the Poisson-binomial convolution. With s(i) = src[i] inside
  // [0, src_len) and 0 outside:
  //   dst[j] = s(j + offset) * (1 - p) + s(j + offset - 1) * p,  j < dst_len.
  void (*bernoulli_step)(const double* src, std::size_t src_len, double p, std::ptrdiff_t offset,
                         double* dst, std::size_t dst_len);

  // sum_{i < count} x[i] * y_last[-i], Neumaier-compensated in four
  // interleaved lanes (term i goes to lane i % 4).
  double (*dot_reversed)(const double* x, const double* y_last, std::size_t count);
};

const KernelTable& scalar_kernels() noexcept;

/// True when the variant is compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Throws std::invalid_argument if the variant is unavailable.
const KernelTable& kernels_for(Isa isa);

/// Best available variant, chosen once per process. The environment variable
/// ENTROPY_SAMPLER_ISA (scalar|avx2|neon) overrides the choice.
const KernelTable& active_kernels() noexcept;

inline void bernoulli_step(std::span<const double> src, double p, std::ptrdiff_t offset,
                           std::span<double> dst, const KernelTable& k = active_kernels()) {
  k.bernoulli_step(src.data(), src.size(), p, offset, dst.data(), dst.size());
}

/// sum_i x[i] * y[y.size() - 1 - i] over i < min(x.size(), y.size()), with y
/// read from its last element backwards.
inline double dot_reversed(std::span<const double> x, std::span<const double> y,
                           const KernelTable& k = active_kernels()) {
  const std::size_t count = x.size() < y.size() ? x.size() : y.size();
  if (count == 0) return 0.0;
  return k.dot_reversed(x.data(), y.data() + (y.size() - 1), count);
}

}  // namespace rejective::kernels
