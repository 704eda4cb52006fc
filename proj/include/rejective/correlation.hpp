#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rejective/asymptotic.hpp"
#include "rejective/design.hpp"
#include "rejective/exact_oracle.hpp"

namespace rejective {

/// Joint inclusion probabilities keyed by sorted unit sets.
using InclusionTable = std::map<std::vector<UnitIndex>, double>;

/// Every nonempty subset of `units` with at most max_order members.
InclusionTable inclusion_table(const ExactOracle& oracle, std::span<const UnitIndex> units,
                               std::size_t max_order);

/// E prod (I - pi) over A written through joint inclusion probabilities:
/// sum_{m=2}^k (-1)^{k-m} sum_{|B|=m} (pi_B - prod_B pi) prod_{A\B} pi,
/// with B running over unordered m-subsets. Throws Error{MissingEntry}.
double lemma4_decompose(const InclusionTable& table, std::span<const UnitIndex> units);

struct CentralMomentQuery {
  std::vector<UnitIndex> units;
  std::vector<int> powers;
};

inline constexpr std::size_t kMaxMomentUnits = 10;

/// E prod_j (I_j - pi_j)^{n_j} from the 2^k exact inclusion patterns.
/// pattern[mask] has unit j included iff bit j is set.
double central_moment_from_patterns(std::span<const double> patterns,
                                    std::span<const double> pi, std::span<const int> powers);

/// Exact central moment. Throws Error{GuardViolation} for k > 10, and
/// Error{BadInput} for k < 2 or a power below 1.
double central_moment_exact(const ExactOracle& oracle, const CentralMomentQuery& query);
double central_moment_exact(const Design& design, const CentralMomentQuery& query);

/// Max |central moment| over k-tuples (every distinct assignment of the
/// powers to the tuple's units) against d. Pairs are exhaustive.
ScalingStudy proposition1_study(std::span<const Design> family, std::string description,
                                std::span<const int> powers, const StudyOptions& options);

struct ConditionRow {
  std::size_t N = 0;
  std::int64_t n = 0;
  double d = 0.0;
  double N_over_d = 0.0;
  double c2max = 0.0;  // n max |E(I_i - pi_i)(I_j - pi_j)|
  double c3max = 0.0;  // N^3/n^2 max |E(I_i - pi_i)^2 (I_j - pi_j)(I_k - pi_k)|
  double c4max = 0.0;  // N^4/n^2 max |E prod of four centred indicators|
  double cpair = 0.0;  // max |E(I_i I_j - pi_ij)(I_k I_l - pi_kl)|
  std::string coverage;
};

struct ConditionReport {
  std::string family;
  std::vector<ConditionRow> rows;
};

struct ConditionOptions {
  std::size_t tuple_budget = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::size_t exhaustive_pair_limit = 2048;
};

/// Exact per-tuple values; pairs exhaustive up to exhaustive_pair_limit,
/// triples and quadruples through select_tuples.
ConditionRow check_conditions(const Design& design, const ConditionOptions& options);
ConditionReport check_conditions(std::span<const Design> family, std::string description,
                                 const ConditionOptions& options);

struct ArratiaExample {
  double gamma = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  std::size_t N = 0;
  std::size_t n = 0;
  std::size_t k = 0;  // units in the large-p block
  double p_large = 0.0;
  double p_small = 0.0;
  Design design;
  double d_over_N = 0.0;
  double N_over_d = 0.0;

  /// Fraction of units with eps/(1+eps) < p < 1/(1+eps).
  double window_fraction(double eps) const;
};

/// Two-block design: k = round(alpha N) units at gamma/alpha, the rest at
/// (n - k gamma/alpha)/(N - k) with n = round(gamma N). When rounding makes
/// that negative the small block gets 0 and the large block n/k.
/// Throws Error{ParameterOrderViolated} unless 0 < gamma < alpha < 1 - delta < 1.
ArratiaExample arratia_example(double gamma, double delta, double alpha, std::size_t N);

/// 0.05, 0.10, ..., 0.95.
std::vector<double> arratia_eps_grid();

}  // namespace rejective
