#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rejective/asymptotic.hpp"
#include "rejective/correlation.hpp"
#include "rejective/exact_oracle.hpp"
#include "rejective/samplers.hpp"

namespace rejective {

/// File open, write or read failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, so every double reads back exactly.
std::string format_double(double value);
double parse_double(std::string_view text);

/// Splits one CSV line; fields may be double-quoted.
std::vector<std::string> split_csv_line(std::string_view line);

/// Unit lists are written 1-based, comma-separated, e.g. "1,2".
std::string format_units(const std::vector<UnitIndex>& units);
std::vector<UnitIndex> parse_units(std::string_view text);

void write_study_csv(std::ostream& out, const ScalingStudy& study);
ScalingStudy read_study_csv(std::istream& in);

void write_condition_csv(std::ostream& out, const ConditionReport& report);
ConditionReport read_condition_csv(std::istream& in);

void write_inclusion_csv(std::ostream& out, const std::vector<InclusionResult>& rows);
std::vector<InclusionResult> read_inclusion_csv(std::istream& in);

void write_approx_csv(std::ostream& out, const std::vector<ApproxReport>& rows);
std::vector<ApproxReport> read_approx_csv(std::istream& in);

struct EdgeworthRow {
  std::int64_t l = 0;
  double exact = 0.0;
  double f0 = 0.0;
  double f2 = 0.0;
  double f4 = 0.0;
};
void write_edgeworth_csv(std::ostream& out, const std::vector<EdgeworthRow>& rows);
std::vector<EdgeworthRow> read_edgeworth_csv(std::istream& in);

void write_samples(std::ostream& out, const std::vector<Sample>& samples);
std::vector<std::vector<UnitIndex>> read_samples(std::istream& in);

struct ArratiaRow {
  std::size_t N = 0;
  std::size_t n = 0;
  double d_over_N = 0.0;
  double N_over_d = 0.0;
  double eps = 0.0;
  double window_fraction = 0.0;
};
std::vector<ArratiaRow> arratia_rows(const ArratiaExample& example);
void write_arratia_csv(std::ostream& out, const std::vector<ArratiaRow>& rows);
std::vector<ArratiaRow> read_arratia_csv(std::istream& in);

/// Runs `write` on a binary-mode stream for `path` (LF endings everywhere).
/// Throws IoError.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& write);

}  // namespace rejective
