#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace rejective {

/// 0-based unit index into a design's population.
using UnitIndex = std::size_t;

inline constexpr double kSumTolerance = 1e-9;

/// Poisson parameters p_1..p_N together with the fixed sample size n of the
/// rejective design they induce. Instances are only produced by
/// validate_design, so every Design in circulation satisfies its invariants.
class Design {
 public:
  std::span<const double> p() const noexcept { return p_; }
  double p(UnitIndex i) const { return p_.at(i); }
  std::size_t population_size() const noexcept { return p_.size(); }
  std::size_t sample_size() const noexcept { return n_; }

  /// Number of units with p_i == 1 (always sampled).
  std::size_t certain_units() const noexcept { return ones_; }

  friend bool operator==(const Design&, const Design&) = default;

 private:
  friend Design validate_design(std::vector<double> p, std::int64_t n);
  Design(std::vector<double> p, std::size_t n, std::size_t ones)
      : p_(std::move(p)), n_(n), ones_(ones) {}

  std::vector<double> p_;
  std::size_t n_ = 0;
  std::size_t ones_ = 0;
};

/// Validates p and n. p is stored exactly as given.
/// Throws Error{OutOfRange | Infeasible | SumMismatch | BadInput}.
Design validate_design(std::vector<double> p, std::int64_t n);

struct DesignStats {
  double d = 0.0;       // sum p(1-p)
  double p_bb = 0.0;    // d^-1 sum p^2(1-p)
  double pq_bb = 0.0;   // d^-1 sum p^2(1-p)^2
  double ratio_N_over_d = 0.0;
};

/// Throws Error{DegenerateDesign} when d == 0.
DesignStats design_stats(const Design& design);

/// Sum of p_i(1-p_i) without the d > 0 requirement.
double poisson_variance(const Design& design);

struct SubsetStats {
  std::vector<UnitIndex> units;
  double B1 = 0.0;  // sum p
  double B2 = 0.0;  // sum p(1-p)
  double B3 = 0.0;  // sum p(1-p)(1-2p)
  double B4 = 0.0;  // sum p(1-p)(1-6p+6p^2)
  std::size_t k = 0;
};

SubsetStats subset_stats(const Design& design, std::span<const UnitIndex> units);

/// Checks that units are distinct and < population; returns them sorted.
/// Throws Error{BadIndex}.
std::vector<UnitIndex> checked_units(const Design& design, std::span<const UnitIndex> units);

/// JSON design file: {"p": [...], "n": integer}. Unknown keys are rejected.
Design read_design_json(std::istream& in);
Design read_design_file(const std::filesystem::path& path);
void write_design_json(std::ostream& out, const Design& design);

}  // namespace rejective
