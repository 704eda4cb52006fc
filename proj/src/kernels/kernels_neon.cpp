#include <arm_neon.h>

#include "lanes.hpp"
#include "rejective/kernels.hpp"

namespace rejective::kernels {
namespace {

void bernoulli_step_neon(const double* src, std::size_t src_len, double p, std::ptrdiff_t offset,
                         double* dst, std::size_t dst_len) {
  const double q = 1.0 - p;
  const auto len = static_cast<std::ptrdiff_t>(src_len);
  const auto [first, last] = detail::interior(src_len, offset, dst_len);

  std::size_t j = 0;
  for (; j < first; ++j) {
    dst[j] = detail::step_value(src, len, p, q, static_cast<std::ptrdiff_t>(j) + offset);
  }
  const float64x2_t vp = vdupq_n_f64(p);
  const float64x2_t vq = vdupq_n_f64(q);
  for (; j + 2 <= last; j += 2) {
    const double* a = src + (static_cast<std::ptrdiff_t>(j) + offset);
    const float64x2_t cur = vld1q_f64(a);
    const float64x2_t prev = vld1q_f64(a - 1);
    vst1q_f64(dst + j, vaddq_f64(vmulq_f64(cur, vq), vmulq_f64(prev, vp)));
  }
  for (; j < dst_len; ++j) {
    dst[j] = detail::step_value(src, len, p, q, static_cast<std::ptrdiff_t>(j) + offset);
  }
}

inline void neumaier_lane_pair(float64x2_t& sum, float64x2_t& comp, float64x2_t v) {
  const float64x2_t t = vaddq_f64(sum, v);
  const uint64x2_t sum_is_big = vcgeq_f64(vabsq_f64(sum), vabsq_f64(v));
  const float64x2_t big = vbslq_f64(sum_is_big, sum, v);
  const float64x2_t small = vbslq_f64(sum_is_big, v, sum);
  comp = vaddq_f64(comp, vaddq_f64(vsubq_f64(big, t), small));
  sum = t;
}

double dot_reversed_neon(const double* x, const double* y_last, std::size_t count) {
  // Two registers cover lanes {0,1} and {2,3} of the four-lane layout.
  float64x2_t sum_lo = vdupq_n_f64(0.0), sum_hi = vdupq_n_f64(0.0);
  float64x2_t comp_lo = vdupq_n_f64(0.0), comp_hi = vdupq_n_f64(0.0);

  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const float64x2_t y_lo = vextq_f64(vld1q_f64(y_last - i - 1), vld1q_f64(y_last - i - 1), 1);
    const float64x2_t y_hi = vextq_f64(vld1q_f64(y_last - i - 3), vld1q_f64(y_last - i - 3), 1);
    neumaier_lane_pair(sum_lo, comp_lo, vmulq_f64(vld1q_f64(x + i), y_lo));
    neumaier_lane_pair(sum_hi, comp_hi, vmulq_f64(vld1q_f64(x + i + 2), y_hi));
  }

  double s[detail::kLanes];
  double c[detail::kLanes];
  vst1q_f64(s, sum_lo);
  vst1q_f64(s + 2, sum_hi);
  vst1q_f64(c, comp_lo);
  vst1q_f64(c + 2, comp_hi);
  for (; i < count; ++i) {
    detail::neumaier_add(s[i % detail::kLanes], c[i % detail::kLanes], x[i] * *(y_last - i));
  }
  return detail::finish_lanes(s, c);
}

}  // namespace

extern const KernelTable kNeonKernels;
const KernelTable kNeonKernels{Isa::Neon, &bernoulli_step_neon, &dot_reversed_neon};

}  // namespace rejective::kernels
