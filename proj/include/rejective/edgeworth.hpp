#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rejective/design.hpp"

namespace rejective {

/// Integer polynomial, coefficient i multiplies x^i.
using IntPoly = std::vector<std::int64_t>;

double evaluate(const IntPoly& poly, double x) noexcept;

inline constexpr std::size_t kMaxHermiteOrder = 30;

/// Probabilists' Hermite polynomials H_0..H_kmax with exact integer coefficients.
struct HermiteTable {
  std::vector<IntPoly> coeffs;

  std::size_t max_order() const noexcept { return coeffs.size() - 1; }
  double operator()(std::size_t k, double x) const { return evaluate(coeffs.at(k), x); }
};

/// Three-term recurrence H_{k+1} = x H_k - k H_{k-1}.
/// Throws Error{OrderTooLarge} when k_max > 30.
HermiteTable hermite(std::size_t k_max);

/// Derivative form H_{k+1} = x H_k - H_k', which follows from the Rodrigues
/// definition. Kept separate so the two recurrences can be checked against
/// each other.
HermiteTable hermite_derivative_form(std::size_t k_max);

/// Cumulant e_m(p) of a single Bernoulli(p), built from
/// e_{m+1} = p(1-p) d/dp e_m. For m >= 2, e_m = p(1-p) R_m(p).
struct BernoulliCumulantPoly {
  std::size_t m = 1;
  IntPoly e;
  IntPoly R;  // empty for m = 1
};

/// Throws Error{OrderTooLarge} if a coefficient would overflow 64 bits.
BernoulliCumulantPoly bernoulli_cumulant_poly(std::size_t m);

/// Cumulants of K under Poisson sampling; kappa[m] for m = 1..max_order()
/// (kappa[0] is unused and zero).
struct CumulantSet {
  std::vector<double> kappa;

  std::size_t max_order() const noexcept { return kappa.empty() ? 0 : kappa.size() - 1; }
  double operator[](std::size_t m) const { return kappa.at(m); }
};

CumulantSet cumulants(const Design& design, std::size_t m_max);

/// One non-negative solution of k_1 + 2 k_2 + ... + j k_j = j.
struct PartitionSolution {
  std::vector<std::size_t> k;  // k[m - 1] = k_m
  std::size_t r = 0;           // k_1 + ... + k_j
};

struct PartitionSolutionSet {
  std::size_t j = 0;
  std::vector<PartitionSolution> solutions;
};

inline constexpr std::size_t kMaxPartitionOrder = 20;

/// All solutions, in reverse lexicographic order of (k_1, ..., k_j).
/// Throws Error{OrderTooLarge} unless 1 <= j <= 20.
PartitionSolutionSet partition_solutions(std::size_t j);

/// Edgeworth correction term P_j(x) for a lattice sum with variance d.
/// Needs cumulants up to order j + 2 (Error{MissingCumulant} otherwise) and
/// j <= 10 so that H_{3j} stays inside the exact Hermite range.
double edgeworth_term(const CumulantSet& cumulants, double d, std::size_t j, double x);

inline constexpr std::size_t kMaxEdgeworthOrder = 4;

/// Order-m Edgeworth approximation of P(K = l):
///   f_m(x) = d^{-1/2} phi(x) (1 + sum_{j<=m} P_j(x)),  x = (l - E K) / sqrt(d).
/// Tables are built once, so evaluating many l is cheap.
class EdgeworthApproximation {
 public:
  EdgeworthApproximation(const Design& design, std::size_t max_order = kMaxEdgeworthOrder);

  double density(std::int64_t l, std::size_t m) const;
  double variance() const noexcept { return d_; }
  const CumulantSet& cumulants() const noexcept { return cumulants_; }

 private:
  double d_ = 0.0;
  std::size_t max_order_ = 0;
  std::size_t population_ = 0;
  CumulantSet cumulants_;
};

/// Throws Error{OrderTooLarge} for m > 4, Error{OutOfRange} for l outside [0, N].
double edgeworth_pmf_approx(const Design& design, std::int64_t l, std::size_t m);

struct Lemma1Constants {
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<UnitIndex> subset;
  double B1 = 0.0;
  double B2 = 0.0;
  double x_tilde = 0.0;  // (B1 - k) / sqrt(d - B2)
  double d_tilde = 0.0;  // d - B2
};

/// c1 = (1 - 6 pq_bb)/8 - 5 (1 - 2 p_bb)^2 / 24.
double lemma1_c1(const DesignStats& stats) noexcept;

/// Constants of the d^{-1} terms in P(K = n) and P(K = n | units all sampled).
/// An empty subset is allowed (c2 = c1). Throws Error{DTildeNonpositive}.
Lemma1Constants lemma1_constants(const Design& design, std::span<const UnitIndex> subset);

}  // namespace rejective
