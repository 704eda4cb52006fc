#include "rejective/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rejective/compensated_sum.hpp"
#include "rejective/error.hpp"
#include "rejective/parallel.hpp"
#include "rejective/tuples.hpp"

namespace rejective {

namespace {

// sum_{i<j} (1 - v_i)(1 - v_j)
double pair_correction(std::span<const double> v) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) acc += (1.0 - v[i]) * (1.0 - v[j]);
  }
  return acc.value();
}

double product(std::span<const double> v) {
  double out = 1.0;
  for (double x : v) out *= x;
  return out;
}

// Approximation of pi_A from the first-order pi and p of the units in A.
double approximate(Method formula, std::span<const double> pi, std::span<const double> p,
                   double d) {
  switch (formula) {
    case Method::Theorem1P:
      return product(pi) * (1.0 - pair_correction(p) / d);
    case Method::Theorem1Pi:
    case Method::Hajek2:
      return theorem1_pi(pi, d);
    default:
      throw Error(ErrorCode::BadInput, "not an approximation formula: " + std::string(to_string(formula)));
  }
}

ApproxReport build_report(const ExactOracle& oracle, std::span<const UnitIndex> units,
                          Method formula) {
  const Design& design = oracle.design();
  auto sorted = checked_units(design, units);
  if (sorted.size() < 2) throw Error(ErrorCode::BadIndex, "approximations need at least 2 units");

  std::vector<double> pi, p;
  for (UnitIndex i : sorted) {
    const UnitIndex one[] = {i};
    pi.push_back(oracle.inclusion(one));
    p.push_back(design.p(i));
  }
  ApproxReport r;
  r.units = std::move(sorted);
  r.formula = formula;
  r.d = design_stats(design).d;
  r.approx_value = approximate(formula, pi, p, r.d);
  r.exact_value = oracle.inclusion(r.units);
  r.abs_error = std::abs(r.approx_value - *r.exact_value);
  r.rel_error = *r.exact_value != 0.0 ? r.abs_error / std::abs(*r.exact_value)
                                      : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

ApproxReport theorem1_p(const ExactOracle& oracle, std::span<const UnitIndex> units) {
  return build_report(oracle, units, Method::Theorem1P);
}

ApproxReport theorem1_p(const Design& design, std::span<const UnitIndex> units) {
  return theorem1_p(ExactOracle(design), units);
}

double theorem1_pi(std::span<const double> pi, double d) {
  return product(pi) * (1.0 - pair_correction(pi) / d);
}

ApproxReport theorem1_pi_report(const ExactOracle& oracle, std::span<const UnitIndex> units) {
  return build_report(oracle, units, Method::Theorem1Pi);
}

double hajek_second_order(double pi_i, double pi_j, double d) noexcept {
  return pi_i * pi_j * (1.0 - (1.0 - pi_i) * (1.0 - pi_j) / d);
}

std::vector<double> first_order_relation(const Design& design) {
  const auto stats = design_stats(design);
  std::vector<double> out;
  out.reserve(design.population_size());
  for (double p : design.p()) out.push_back(p * (1.0 + (p - stats.p_bb) * (1.0 - p) / stats.d));
  return out;
}

namespace {

double logistic(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

// Shifts every logit(p_i) by a common constant so that sum p = n.
void renormalise(std::vector<double>& p, double n) {
  if (std::abs(compensated_sum(p) - n) <= 1e-12 * n) return;
  std::vector<double> logit(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = std::clamp(p[i], 1e-15, 1.0 - 1e-15);
    logit[i] = std::log(v / (1.0 - v));
  }
  double shift = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    CompensatedSum f, slope;
    for (double x : logit) {
      const double s = logistic(x + shift);
      f += s;
      slope += s * (1.0 - s);
    }
    const double excess = f.value() - n;
    if (std::abs(excess) <= 1e-13 * n) break;
    shift -= excess / slope.value();
  }
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = logistic(logit[i] + shift);
}

}  // namespace

Calibration calibrate_design(std::span<const double> target_pi, std::int64_t n, double tol,
                             std::size_t max_iter) {
  if (target_pi.empty() || n < 1) throw Error(ErrorCode::InfeasibleTarget, "empty target or n < 1");
  for (double t : target_pi) {
    if (!(t > 0.0 && t < 1.0)) {
      std::ostringstream msg;
      msg << "target " << t << " is outside (0,1)";
      throw Error(ErrorCode::InfeasibleTarget, msg.str());
    }
  }
  const double nd = static_cast<double>(n);
  if (std::abs(compensated_sum(target_pi) - nd) > 1e-6) {
    throw Error(ErrorCode::InfeasibleTarget, "targets do not sum to n");
  }

  std::vector<double> p(target_pi.begin(), target_pi.end());
  renormalise(p, nd);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter <= max_iter; ++iter) {
    Design design = validate_design(p, n);
    const auto pi = ExactOracle(design).first_order();
    residual = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      residual = std::max(residual, std::abs(pi[i] - target_pi[i]));
    }
    if (residual <= tol) return Calibration{std::move(design), iter, residual};
    if (iter == max_iter) break;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] *= target_pi[i] / pi[i];
    renormalise(p, nd);
  }
  std::ostringstream msg;
  msg.precision(3);
  msg << "no convergence after " << max_iter << " iterations, residual " << residual;
  throw Error(ErrorCode::NoConvergence, msg.str());
}

LogLogFit fit_loglog(std::span<const ScalingPoint> points) {
  std::vector<double> xs, ys;
  for (const auto& pt : points) {
    if (pt.max_abs_error > 0.0 && std::isfinite(pt.max_abs_error) && pt.d > 0.0) {
      xs.push_back(std::log10(pt.d));
      ys.push_back(std::log10(pt.max_abs_error));
    }
  }
  const std::size_t m = xs.size();
  if (m < 4) {
    throw Error(ErrorCode::DegenerateFit, "need at least 4 points with positive error, got " +
                                              std::to_string(m));
  }
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx.value() / static_cast<double>(m);
  const double my = sy.value() / static_cast<double>(m);
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx.value() > 0.0)) throw Error(ErrorCode::DegenerateFit, "all points share the same d");

  LogLogFit fit;
  fit.slope = sxy.value() / sxx.value();
  const double intercept = my - fit.slope * mx;
  CompensatedSum rss;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - intercept - fit.slope * xs[i];
    rss += r * r;
  }
  fit.slope_stderr = std::sqrt(rss.value() / static_cast<double>(m - 2) / sxx.value());
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  fit.span_decades = *hi - *lo;
  return fit;
}

ScalingStudy make_study(std::string family, std::vector<ScalingPoint> points,
                        std::vector<std::string> coverage) {
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a].d < points[b].d; });
  ScalingStudy study;
  study.family = std::move(family);
  for (std::size_t i : order) {
    study.points.push_back(points[i]);
    if (i < coverage.size()) study.coverage.push_back(coverage[i]);
  }
  const auto fit = fit_loglog(study.points);
  study.fitted_slope = fit.slope;
  study.slope_stderr = fit.slope_stderr;
  study.span_decades = fit.span_decades;
  return study;
}

ScalingStudy error_scaling_study(std::span<const Design> family, std::string description,
                                 std::size_t k, Method formula, const StudyOptions& options) {
  if (k < 2) throw Error(ErrorCode::BadInput, "study order must be >= 2");
  if (formula == Method::Hajek2 && k != 2) {
    throw Error(ErrorCode::BadInput, "the hajek2 formula is only defined for pairs");
  }
  if (formula != Method::Theorem1P && formula != Method::Theorem1Pi && formula != Method::Hajek2) {
    throw Error(ErrorCode::BadInput, "unsupported study formula");
  }

  std::vector<ScalingPoint> points;
  std::vector<std::string> coverage;
  for (const Design& design : family) {
    const ExactOracle oracle(design);
    const auto pi = oracle.first_order();
    const double d = design_stats(design).d;
    const std::size_t N = design.population_size();
    double worst = 0.0;

    if (k == 2) {
      const auto table = oracle.pair_table(options.workers);
      std::vector<double> row_max(N, 0.0);
      parallel_for(N, options.workers, [&](std::size_t i) {
        double m = 0.0;
        for (std::size_t j = i + 1; j < N; ++j) {
          const double upi[] = {pi[i], pi[j]};
          const double up[] = {design.p(i), design.p(j)};
          m = std::max(m, std::abs(table[i * N + j] - approximate(formula, upi, up, d)));
        }
        row_max[i] = m;
      });
      worst = *std::max_element(row_max.begin(), row_max.end());
      coverage.push_back("exhaustive:" + std::to_string(binomial(N, 2)));
    } else {
      const auto tuples = select_tuples(design, k, options.tuple_budget, options.seed);
      std::vector<double> errors(tuples.size(), 0.0);
      parallel_for(tuples.size(), options.workers, [&](std::size_t t) {
        const auto units = tuples[t];
        std::vector<double> upi, up;
        for (UnitIndex i : units) {
          upi.push_back(pi[i]);
          up.push_back(design.p(i));
        }
        errors[t] = std::abs(oracle.inclusion(units) - approximate(formula, upi, up, d));
      });
      if (!errors.empty()) worst = *std::max_element(errors.begin(), errors.end());
      coverage.push_back(tuples.coverage());
    }
    points.push_back(ScalingPoint{N, d, worst});
  }
  return make_study(std::move(description), std::move(points), std::move(coverage));
}

}  // namespace rejective
