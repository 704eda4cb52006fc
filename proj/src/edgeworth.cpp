#include "rejective/edgeworth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rejective/compensated_sum.hpp"
#include "rejective/error.hpp"

namespace rejective {

double evaluate(const IntPoly& poly, double x) noexcept {
  double acc = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + static_cast<double>(*it);
  return acc;
}

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorCode::OrderTooLarge, "integer coefficient overflow");
  }
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorCode::OrderTooLarge, "integer coefficient overflow");
  }
  return out;
}

double factorial(std::size_t k) noexcept {
  double f = 1.0;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
  return f;
}

void check_hermite_order(std::size_t k_max) {
  if (k_max > kMaxHermiteOrder) {
    throw Error(ErrorCode::OrderTooLarge, "Hermite order " + std::to_string(k_max) +
                                              " exceeds the exact range (30)");
  }
}

}  // namespace

HermiteTable hermite(std::size_t k_max) {
  check_hermite_order(k_max);
  HermiteTable t;
  t.coeffs.push_back({1});
  if (k_max >= 1) t.coeffs.push_back({0, 1});
  for (std::size_t k = 1; k < k_max; ++k) {
    const IntPoly& cur = t.coeffs[k];
    const IntPoly& prev = t.coeffs[k - 1];
    IntPoly next(k + 2, 0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] = cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) {
      next[i] = checked_add(next[i], -checked_mul(static_cast<std::int64_t>(k), prev[i]));
    }
    t.coeffs.push_back(std::move(next));
  }
  return t;
}

HermiteTable hermite_derivative_form(std::size_t k_max) {
  check_hermite_order(k_max);
  HermiteTable t;
  t.coeffs.push_back({1});
  for (std::size_t k = 0; k < k_max; ++k) {
    const IntPoly& cur = t.coeffs[k];
    IntPoly next(cur.size() + 1, 0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] = cur[i];
    for (std::size_t i = 1; i < cur.size(); ++i) {
      next[i - 1] = checked_add(next[i - 1], -checked_mul(static_cast<std::int64_t>(i), cur[i]));
    }
    t.coeffs.push_back(std::move(next));
  }
  return t;
}

BernoulliCumulantPoly bernoulli_cumulant_poly(std::size_t m) {
  if (m < 1) throw Error(ErrorCode::OrderTooLarge, "cumulant order must be >= 1");
  IntPoly e{0, 1};
  for (std::size_t order = 1; order < m; ++order) {
    // (p - p^2) * e'
    IntPoly deriv(e.size() > 1 ? e.size() - 1 : 1, 0);
    for (std::size_t i = 1; i < e.size(); ++i) {
      deriv[i - 1] = checked_mul(static_cast<std::int64_t>(i), e[i]);
    }
    IntPoly next(deriv.size() + 2, 0);
    for (std::size_t i = 0; i < deriv.size(); ++i) {
      next[i + 1] = checked_add(next[i + 1], deriv[i]);
      next[i + 2] = checked_add(next[i + 2], -deriv[i]);
    }
    while (next.size() > 1 && next.back() == 0) next.pop_back();
    e = std::move(next);
  }

  BernoulliCumulantPoly out;
  out.m = m;
  out.e = e;
  if (m >= 2) {
    // e = p (1 - p) R: divide by p, then by (1 - p).
    IntPoly g(e.begin() + 1, e.end());
    IntPoly R(g.size() - 1, 0);
    std::int64_t carry = 0;
    for (std::size_t i = 0; i < R.size(); ++i) {
      carry = checked_add(g[i], carry);
      R[i] = carry;
    }
    out.R = std::move(R);
  }
  return out;
}

CumulantSet cumulants(const Design& design, std::size_t m_max) {
  if (m_max < 2) throw Error(ErrorCode::BadInput, "cumulants need m_max >= 2");
  CumulantSet set;
  set.kappa.assign(m_max + 1, 0.0);

  auto canonical = [&](auto term) {
    std::vector<double> terms;
    terms.reserve(design.population_size());
    for (double p : design.p()) terms.push_back(term(p));
    std::sort(terms.begin(), terms.end());
    return compensated_sum(terms);
  };

  set.kappa[1] = canonical([](double p) { return p; });
  set.kappa[2] = poisson_variance(design);
  for (std::size_t m = 3; m <= m_max; ++m) {
    const auto poly = bernoulli_cumulant_poly(m);
    set.kappa[m] = canonical([&](double p) { return p * (1.0 - p) * evaluate(poly.R, p); });
  }
  return set;
}

namespace {

void enumerate_partitions(std::size_t j, std::size_t part, std::size_t remaining,
                          std::vector<std::size_t>& k, std::vector<PartitionSolution>& out) {
  if (part == 0) {
    if (remaining == 0) {
      PartitionSolution s;
      s.k = k;
      for (std::size_t v : k) s.r += v;
      out.push_back(std::move(s));
    }
    return;
  }
  // Part sizes are handled from 1 upward so that k_1 varies slowest.
  const std::size_t m = j - part + 1;
  for (std::size_t count = remaining / m + 1; count-- > 0;) {
    k[m - 1] = count;
    enumerate_partitions(j, part - 1, remaining - count * m, k, out);
  }
  k[m - 1] = 0;
}

}  // namespace

PartitionSolutionSet partition_solutions(std::size_t j) {
  if (j < 1 || j > kMaxPartitionOrder) {
    throw Error(ErrorCode::OrderTooLarge, "partition order must be in [1, 20]");
  }
  PartitionSolutionSet set;
  set.j = j;
  std::vector<std::size_t> k(j, 0);
  enumerate_partitions(j, j, j, k, set.solutions);
  return set;
}

double edgeworth_term(const CumulantSet& cumulants, double d, std::size_t j, double x) {
  if (j == 0) return 0.0;
  if (3 * j > kMaxHermiteOrder) {
    throw Error(ErrorCode::OrderTooLarge, "Edgeworth term order must be <= 10");
  }
  if (cumulants.max_order() < j + 2) {
    throw Error(ErrorCode::MissingCumulant, "P_" + std::to_string(j) + " needs cumulants up to " +
                                                std::to_string(j + 2));
  }
  static const HermiteTable table = hermite(kMaxHermiteOrder);
  const auto partitions = partition_solutions(j);

  CompensatedSum acc;
  for (const auto& sol : partitions.solutions) {
    double weight = 1.0;
    for (std::size_t m = 1; m <= j; ++m) {
      const std::size_t km = sol.k[m - 1];
      if (km == 0) continue;
      const double scaled = cumulants[m + 2] / d / factorial(m + 2);
      weight *= std::pow(scaled, static_cast<double>(km)) / factorial(km);
    }
    acc += table(j + 2 * sol.r, x) * weight;
  }
  return std::pow(d, -0.5 * static_cast<double>(j)) * acc.value();
}

EdgeworthApproximation::EdgeworthApproximation(const Design& design, std::size_t max_order)
    : max_order_(max_order), population_(design.population_size()) {
  if (max_order > kMaxEdgeworthOrder) {
    throw Error(ErrorCode::OrderTooLarge, "Edgeworth order must be <= 4");
  }
  d_ = design_stats(design).d;
  cumulants_ = rejective::cumulants(design, max_order + 2);
}

double EdgeworthApproximation::density(std::int64_t l, std::size_t m) const {
  if (m > max_order_) throw Error(ErrorCode::OrderTooLarge, "Edgeworth order exceeds table");
  if (l < 0 || static_cast<std::size_t>(l) > population_) {
    throw Error(ErrorCode::OutOfRange, "l must lie in [0, N]");
  }
  const double x = (static_cast<double>(l) - cumulants_[1]) / std::sqrt(d_);
  double correction = 1.0;
  for (std::size_t j = 1; j <= m; ++j) correction += edgeworth_term(cumulants_, d_, j, x);
  const double phi = std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
  return phi / std::sqrt(d_) * correction;
}

double edgeworth_pmf_approx(const Design& design, std::int64_t l, std::size_t m) {
  return EdgeworthApproximation(design, m).density(l, m);
}

double lemma1_c1(const DesignStats& stats) noexcept {
  const double skew = 1.0 - 2.0 * stats.p_bb;
  return (1.0 - 6.0 * stats.pq_bb) / 8.0 - 5.0 / 24.0 * skew * skew;
}

Lemma1Constants lemma1_constants(const Design& design, std::span<const UnitIndex> subset) {
  const auto stats = design_stats(design);
  Lemma1Constants out;
  out.c1 = lemma1_c1(stats);
  double k = 0.0;
  if (!subset.empty()) {
    const auto s = subset_stats(design, subset);
    out.subset = s.units;
    out.B1 = s.B1;
    out.B2 = s.B2;
    k = static_cast<double>(s.k);
  }
  out.d_tilde = stats.d - out.B2;
  if (!(out.d_tilde > 0.0)) {
    throw Error(ErrorCode::DTildeNonpositive, "d - B2 must be positive");
  }
  const double shift = out.B1 - k;
  out.x_tilde = shift / std::sqrt(out.d_tilde);
  out.c2 = 0.5 * (out.B2 - shift * shift) - 0.5 * shift * (1.0 - 2.0 * stats.p_bb) + out.c1;
  return out;
}

}  // namespace rejective
