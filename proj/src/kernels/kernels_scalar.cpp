#include "lanes.hpp"
#include "rejective/kernels.hpp"

namespace rejective::kernels {
namespace {

void bernoulli_step_scalar(const double* src, std::size_t src_len, double p,
                           std::ptrdiff_t offset, double* dst, std::size_t dst_len) {
  const double q = 1.0 - p;
  const auto len = static_cast<std::ptrdiff_t>(src_len);
  for (std::size_t j = 0; j < dst_len; ++j) {
    dst[j] = detail::step_value(src, len, p, q, static_cast<std::ptrdiff_t>(j) + offset);
  }
}

double dot_reversed_scalar(const double* x, const double* y_last, std::size_t count) {
  double sum[detail::kLanes] = {};
  double comp[detail::kLanes] = {};
  for (std::size_t i = 0; i < count; ++i) {
    const double v = x[i] * *(y_last - i);
    detail::neumaier_add(sum[i % detail::kLanes], comp[i % detail::kLanes], v);
  }
  return detail::finish_lanes(sum, comp);
}

constexpr KernelTable kScalar{Isa::Scalar, &bernoulli_step_scalar, &dot_reversed_scalar};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace rejective::kernels
