#include "rejective/design.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rejective/compensated_sum.hpp"
#include "rejective/error.hpp"

namespace rejective {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SumMismatch: return "SumMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::MissingCumulant: return "MissingCumulant";
    case ErrorCode::DTildeNonpositive: return "DTildeNonpositive";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::MissingEntry: return "MissingEntry";
    case ErrorCode::GuardViolation: return "GuardViolation";
    case ErrorCode::ParameterOrderViolated: return "ParameterOrderViolated";
    case ErrorCode::MaxAttemptsExceeded: return "MaxAttemptsExceeded";
    case ErrorCode::NumericGuard: return "NumericGuard";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

namespace {

// Sums in ascending order of value so the result does not depend on unit order.
double canonical_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  return compensated_sum(terms);
}

template <typename F>
double canonical_sum_over(std::span<const double> p, F&& term) {
  std::vector<double> terms;
  terms.reserve(p.size());
  for (double v : p) terms.push_back(term(v));
  return canonical_sum(std::move(terms));
}

}  // namespace

Design validate_design(std::vector<double> p, std::int64_t n) {
  if (p.empty()) throw Error(ErrorCode::BadInput, "design has no units");
  if (n < 1) throw Error(ErrorCode::BadInput, "sample size must be >= 1");

  std::size_t ones = 0;
  std::size_t positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = p[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream msg;
      msg << "p[" << i + 1 << "] = " << v << " is outside [0,1]";
      throw Error(ErrorCode::OutOfRange, msg.str());
    }
    if (v == 1.0) ++ones;
    if (v > 0.0) ++positive;
  }
  const auto target = static_cast<std::size_t>(n);
  if (ones > target || positive < target) {
    std::ostringstream msg;
    msg << "K = " << n << " is impossible: " << ones << " certain units, " << positive
        << " units with p > 0";
    throw Error(ErrorCode::Infeasible, msg.str());
  }

  const double total = compensated_sum(p);
  if (std::abs(total - static_cast<double>(n)) > kSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "sum of p is " << total << ", expected " << n;
    throw Error(ErrorCode::SumMismatch, msg.str());
  }
  return Design(std::move(p), target, ones);
}

double poisson_variance(const Design& design) {
  return canonical_sum_over(design.p(), [](double v) { return v * (1.0 - v); });
}

DesignStats design_stats(const Design& design) {
  const auto p = design.p();
  DesignStats s;
  s.d = poisson_variance(design);
  if (!(s.d > 0.0)) {
    throw Error(ErrorCode::DegenerateDesign, "d = 0: every unit has p in {0,1}");
  }
  s.p_bb = canonical_sum_over(p, [](double v) { return v * v * (1.0 - v); }) / s.d;
  s.pq_bb = canonical_sum_over(p, [](double v) {
              const double q = v * (1.0 - v);
              return q * q;
            }) / s.d;
  s.ratio_N_over_d = static_cast<double>(p.size()) / s.d;
  return s;
}

std::vector<UnitIndex> checked_units(const Design& design, std::span<const UnitIndex> units) {
  std::vector<UnitIndex> sorted(units.begin(), units.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] >= design.population_size()) {
      throw Error(ErrorCode::BadIndex, "unit " + std::to_string(sorted[i] + 1) +
                                           " is outside the population");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw Error(ErrorCode::BadIndex, "unit " + std::to_string(sorted[i] + 1) + " is repeated");
    }
  }
  return sorted;
}

SubsetStats subset_stats(const Design& design, std::span<const UnitIndex> units) {
  if (units.empty()) throw Error(ErrorCode::BadIndex, "empty unit set");
  SubsetStats s;
  s.units = checked_units(design, units);
  s.k = s.units.size();
  CompensatedSum b1, b2, b3, b4;
  for (UnitIndex i : s.units) {
    const double v = design.p(i);
    const double q = v * (1.0 - v);
    b1 += v;
    b2 += q;
    b3 += q * (1.0 - 2.0 * v);
    b4 += q * (1.0 - 6.0 * v + 6.0 * v * v);
  }
  s.B1 = b1.value();
  s.B2 = b2.value();
  s.B3 = b3.value();
  s.B4 = b4.value();
  return s;
}

Design read_design_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadInput, std::string("design JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::BadInput, "design JSON must be an object");
  for (const auto& item : doc.items()) {
    if (item.key() != "p" && item.key() != "n") {
      throw Error(ErrorCode::BadInput, "design JSON: unknown key '" + item.key() + "'");
    }
  }
  if (!doc.contains("p") || !doc["p"].is_array()) {
    throw Error(ErrorCode::BadInput, "design JSON: 'p' must be an array of numbers");
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw Error(ErrorCode::BadInput, "design JSON: 'n' must be an integer");
  }
  std::vector<double> p;
  p.reserve(doc["p"].size());
  for (const auto& v : doc["p"]) {
    if (!v.is_number()) throw Error(ErrorCode::BadInput, "design JSON: non-numeric entry in 'p'");
    p.push_back(v.get<double>());
  }
  return validate_design(std::move(p), doc["n"].get<std::int64_t>());
}

Design read_design_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open design file " + path.string());
  return read_design_json(in);
}

void write_design_json(std::ostream& out, const Design& design) {
  nlohmann::json doc;
  doc["p"] = std::vector<double>(design.p().begin(), design.p().end());
  doc["n"] = design.sample_size();
  out << doc.dump() << '\n';
}

}  // namespace rejective
