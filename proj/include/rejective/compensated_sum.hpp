#pragma once

#include <cmath>
#include <span>

namespace rejective {

/// Neumaier's improved Kahan summation. Terms are folded in call order, so a
/// fixed iteration order gives a reproducible result.
class CompensatedSum {
 public:
  CompensatedSum& add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator+=(double v) noexcept { return add(v); }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (double v : values) acc += v;
  return acc.value();
}

}  // namespace rejective
