#include <immintrin.h>

#include "lanes.hpp"
#include "rejective/kernels.hpp"

namespace rejective::kernels {
namespace {

__attribute__((target("avx2"))) void bernoulli_step_avx2(const double* src, std::size_t src_len,
                                                        double p, std::ptrdiff_t offset,
                                                        double* dst, std::size_t dst_len) {
  const double q = 1.0 - p;
  const auto len = static_cast<std::ptrdiff_t>(src_len);
  const auto [first, last] = detail::interior(src_len, offset, dst_len);

  std::size_t j = 0;
  for (; j < first; ++j) {
    dst[j] = detail::step_value(src, len, p, q, static_cast<std::ptrdiff_t>(j) + offset);
  }
  const __m256d vp = _mm256_set1_pd(p);
  const __m256d vq = _mm256_set1_pd(q);
  for (; j + 4 <= last; j += 4) {
    const double* a = src + (static_cast<std::ptrdiff_t>(j) + offset);
    const __m256d cur = _mm256_loadu_pd(a);
    const __m256d prev = _mm256_loadu_pd(a - 1);
    _mm256_storeu_pd(dst + j, _mm256_add_pd(_mm256_mul_pd(cur, vq), _mm256_mul_pd(prev, vp)));
  }
  for (; j < dst_len; ++j) {
    dst[j] = detail::step_value(src, len, p, q, static_cast<std::ptrdiff_t>(j) + offset);
  }
}

__attribute__((target("avx2"))) double dot_reversed_avx2(const double* x, const double* y_last,
                                                        std::size_t count) {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();
  const __m256d sign = _mm256_set1_pd(-0.0);

  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    // y_last[-i-3 .. -i] loaded then reversed so lane l holds y_last[-(i+l)].
    const __m256d yv = _mm256_permute4x64_pd(_mm256_loadu_pd(y_last - i - 3), 0x1B);
    const __m256d v = _mm256_mul_pd(xv, yv);
    const __m256d t = _mm256_add_pd(sum, v);
    const __m256d sum_is_big =
        _mm256_cmp_pd(_mm256_andnot_pd(sign, sum), _mm256_andnot_pd(sign, v), _CMP_GE_OQ);
    const __m256d big = _mm256_blendv_pd(v, sum, sum_is_big);
    const __m256d small = _mm256_blendv_pd(sum, v, sum_is_big);
    comp = _mm256_add_pd(comp, _mm256_add_pd(_mm256_sub_pd(big, t), small));
    sum = t;
  }

  double s[detail::kLanes];
  double c[detail::kLanes];
  _mm256_storeu_pd(s, sum);
  _mm256_storeu_pd(c, comp);
  for (; i < count; ++i) {
    detail::neumaier_add(s[i % detail::kLanes], c[i % detail::kLanes], x[i] * *(y_last - i));
  }
  return detail::finish_lanes(s, c);
}

}  // namespace

extern const KernelTable kAvx2Kernels;
const KernelTable kAvx2Kernels{Isa::Avx2, &bernoulli_step_avx2, &dot_reversed_avx2};

}  // namespace rejective::kernels
