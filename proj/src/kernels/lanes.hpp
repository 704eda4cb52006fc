#pragma once

#include <cmath>
#include <cstddef>

#include "rejective/compensated_sum.hpp"

namespace rejective::kernels::detail {

inline constexpr std::size_t kLanes = 4;

inline void neumaier_add(double& sum, double& comp, double v) noexcept {
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v)) {
    comp += (sum - t) + v;
  } else {
    comp += (v - t) + sum;
  }
  sum = t;
}

// Shared lane reduction so every variant finishes identically.
inline double finish_lanes(const double (&sum)[kLanes], const double (&comp)[kLanes]) noexcept {
  CompensatedSum acc;
  for (double s : sum) acc += s;
  return acc.value() + (((comp[0] + comp[1]) + comp[2]) + comp[3]);
}

// Scalar evaluation of one bernoulli_step output with zero padding.
inline double step_value(const double* src, std::ptrdiff_t src_len, double p, double q,
                         std::ptrdiff_t l) noexcept {
  const double a = (l >= 0 && l < src_len) ? src[l] : 0.0;
  const double b = (l - 1 >= 0 && l - 1 < src_len) ? src[l - 1] : 0.0;
  return a * q + b * p;
}

// [first, last) range of j where both taps are inside src.
struct InteriorRange {
  std::size_t first;
  std::size_t last;
};

inline InteriorRange interior(std::size_t src_len, std::ptrdiff_t offset,
                              std::size_t dst_len) noexcept {
  const std::ptrdiff_t lo = offset >= 1 ? 0 : 1 - offset;
  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(src_len) - offset;
  if (hi > static_cast<std::ptrdiff_t>(dst_len)) hi = static_cast<std::ptrdiff_t>(dst_len);
  if (hi < lo) return {0, 0};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

}  // namespace rejective::kernels::detail
