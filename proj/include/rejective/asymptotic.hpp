#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rejective/design.hpp"
#include "rejective/exact_oracle.hpp"

namespace rejective {

struct ApproxReport {
  std::vector<UnitIndex> units;
  double approx_value = 0.0;
  std::optional<double> exact_value;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double d = 0.0;
  Method formula = Method::Theorem1P;
};

/// pi_A ~ prod pi_i * (1 - d^-1 sum_{i<j} (1-p_i)(1-p_j)), with the exact
/// first-order pi_i as the leading factor. The exact pi_A is attached.
/// Needs |A| >= 2.
ApproxReport theorem1_p(const ExactOracle& oracle, std::span<const UnitIndex> units);
ApproxReport theorem1_p(const Design& design, std::span<const UnitIndex> units);

/// Same correction with the first-order pi in place of p:
/// prod pi * (1 - d^-1 sum_{i<j} (1-pi_i)(1-pi_j)).
double theorem1_pi(std::span<const double> pi, double d);

/// theorem1_pi with the report fields filled from the exact oracle.
ApproxReport theorem1_pi_report(const ExactOracle& oracle, std::span<const UnitIndex> units);

/// pi_i pi_j (1 - d^-1 (1-pi_i)(1-pi_j)).
double hajek_second_order(double pi_i, double pi_j, double d) noexcept;

/// pi_i ~ p_i (1 + d^-1 (p_i - p_bb)(1 - p_i)); not renormalised.
std::vector<double> first_order_relation(const Design& design);

struct Calibration {
  Design design;
  std::size_t iterations = 0;
  double residual = 0.0;  // max_i |pi_i - target_i|
};

/// Fixed point p <- p * target / pi(p) on the exact first-order pi, with each
/// step renormalised to sum p = n by a common shift on the logit scale.
/// Throws Error{InfeasibleTarget} or Error{NoConvergence}.
Calibration calibrate_design(std::span<const double> target_pi, std::int64_t n, double tol,
                             std::size_t max_iter);

struct ScalingPoint {
  std::size_t N = 0;
  double d = 0.0;
  double max_abs_error = 0.0;
};

struct LogLogFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double span_decades = 0.0;
};

/// OLS of log10(error) on log10(d). Points with non-positive or non-finite
/// error are skipped; Error{DegenerateFit} with fewer than 4 usable points.
LogLogFit fit_loglog(std::span<const ScalingPoint> points);

struct ScalingStudy {
  std::string family;
  std::vector<ScalingPoint> points;  // sorted by d
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  double span_decades = 0.0;
  std::vector<std::string> coverage;  // tuple coverage per point
};

/// Sorts points, fits and fills the study.
ScalingStudy make_study(std::string family, std::vector<ScalingPoint> points,
                        std::vector<std::string> coverage);

struct StudyOptions {
  std::size_t tuple_budget = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Max over k-tuples of |exact pi_A - approximation| for each design, and
/// the log-log slope against d. formula is Theorem1P, Theorem1Pi or Hajek2
/// (k = 2 only). Pairs are always exhaustive.
ScalingStudy error_scaling_study(std::span<const Design> family, std::string description,
                                 std::size_t k, Method formula, const StudyOptions& options);

}  // namespace rejective
