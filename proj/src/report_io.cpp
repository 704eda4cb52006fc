#include "rejective/report_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rejective/error.hpp"

namespace rejective {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::BadInput, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

template <typename T>
T parse_integer(std::string_view text) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::BadInput, "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

// Reads non-empty lines, checking the header.
std::vector<std::vector<std::string>> read_table(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(ErrorCode::BadInput, "expected CSV header '" + std::string(header) + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(split_csv_line(line));
  }
  return rows;
}

void expect_fields(const std::vector<std::string>& row, std::size_t count) {
  if (row.size() != count) {
    throw Error(ErrorCode::BadInput, "expected " + std::to_string(count) + " CSV fields, got " +
                                         std::to_string(row.size()));
  }
}

std::string quoted(const std::string& s) { return '"' + s + '"'; }

Method parse_method(std::string_view name) {
  for (auto m : {Method::ExactDp, Method::Enumeration, Method::Theorem1P, Method::Theorem1Pi,
                 Method::Hajek2}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::BadInput, "unknown method: " + std::string(name));
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool in_quotes = false;
  for (char c : line) {
    if (c == '"') {
      in_quotes = !in_quotes;
    } else if (c == ',' && !in_quotes) {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (in_quotes) throw Error(ErrorCode::BadInput, "unterminated quote in CSV line");
  return fields;
}

std::string format_units(const std::vector<UnitIndex>& units) {
  std::string out;
  for (std::size_t j = 0; j < units.size(); ++j) {
    if (j) out += ',';
    out += std::to_string(units[j] + 1);
  }
  return out;
}

std::vector<UnitIndex> parse_units(std::string_view text) {
  std::vector<UnitIndex> units;
  if (text.empty()) return units;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    const auto field = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    const auto one_based = parse_integer<std::int64_t>(field);
    if (one_based < 1) throw Error(ErrorCode::BadIndex, "unit indices start at 1");
    units.push_back(static_cast<UnitIndex>(one_based - 1));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return units;
}

void write_study_csv(std::ostream& out, const ScalingStudy& study) {
  out << "N,d,max_abs_error\n";
  for (const auto& pt : study.points) {
    out << pt.N << ',' << format_double(pt.d) << ',' << format_double(pt.max_abs_error) << '\n';
  }
  if (!study.points.empty()) out << "slope," << format_double(study.fitted_slope) << '\n';
}

ScalingStudy read_study_csv(std::istream& in) {
  ScalingStudy study;
  for (const auto& row : read_table(in, "N,d,max_abs_error")) {
    if (row.size() == 2 && row[0] == "slope") {
      study.fitted_slope = parse_double(row[1]);
      continue;
    }
    expect_fields(row, 3);
    study.points.push_back(ScalingPoint{parse_integer<std::size_t>(row[0]), parse_double(row[1]),
                                        parse_double(row[2])});
  }
  return study;
}

void write_condition_csv(std::ostream& out, const ConditionReport& report) {
  out << "N,n,d,N_over_d,c2max,c3max,c4max,cpair,coverage\n";
  for (const auto& r : report.rows) {
    out << r.N << ',' << r.n << ',' << format_double(r.d) << ',' << format_double(r.N_over_d)
        << ',' << format_double(r.c2max) << ',' << format_double(r.c3max) << ','
        << format_double(r.c4max) << ',' << format_double(r.cpair) << ',' << r.coverage << '\n';
  }
}

ConditionReport read_condition_csv(std::istream& in) {
  ConditionReport report;
  for (const auto& row : read_table(in, "N,n,d,N_over_d,c2max,c3max,c4max,cpair,coverage")) {
    expect_fields(row, 9);
    ConditionRow r;
    r.N = parse_integer<std::size_t>(row[0]);
    r.n = parse_integer<std::int64_t>(row[1]);
    r.d = parse_double(row[2]);
    r.N_over_d = parse_double(row[3]);
    r.c2max = parse_double(row[4]);
    r.c3max = parse_double(row[5]);
    r.c4max = parse_double(row[6]);
    r.cpair = parse_double(row[7]);
    r.coverage = row[8];
    report.rows.push_back(std::move(r));
  }
  return report;
}

void write_inclusion_csv(std::ostream& out, const std::vector<InclusionResult>& rows) {
  out << "units,value,method\n";
  for (const auto& r : rows) {
    out << quoted(format_units(r.units)) << ',' << format_double(r.value) << ','
        << to_string(r.method) << '\n';
  }
}

std::vector<InclusionResult> read_inclusion_csv(std::istream& in) {
  std::vector<InclusionResult> out;
  for (const auto& row : read_table(in, "units,value,method")) {
    expect_fields(row, 3);
    InclusionResult r;
    r.units = parse_units(row[0]);
    r.value = parse_double(row[1]);
    r.method = parse_method(row[2]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_approx_csv(std::ostream& out, const std::vector<ApproxReport>& rows) {
  out << "units,approx,exact,abs_error,rel_error,d,formula\n";
  for (const auto& r : rows) {
    out << quoted(format_units(r.units)) << ',' << format_double(r.approx_value) << ','
        << (r.exact_value ? format_double(*r.exact_value) : "") << ','
        << format_double(r.abs_error) << ',' << format_double(r.rel_error) << ','
        << format_double(r.d) << ',' << to_string(r.formula) << '\n';
  }
}

std::vector<ApproxReport> read_approx_csv(std::istream& in) {
  std::vector<ApproxReport> out;
  for (const auto& row : read_table(in, "units,approx,exact,abs_error,rel_error,d,formula")) {
    expect_fields(row, 7);
    ApproxReport r;
    r.units = parse_units(row[0]);
    r.approx_value = parse_double(row[1]);
    if (!row[2].empty()) r.exact_value = parse_double(row[2]);
    r.abs_error = parse_double(row[3]);
    r.rel_error = parse_double(row[4]);
    r.d = parse_double(row[5]);
    r.formula = parse_method(row[6]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_edgeworth_csv(std::ostream& out, const std::vector<EdgeworthRow>& rows) {
  out << "l,exact,f0,f2,f4\n";
  for (const auto& r : rows) {
    out << r.l << ',' << format_double(r.exact) << ',' << format_double(r.f0) << ','
        << format_double(r.f2) << ',' << format_double(r.f4) << '\n';
  }
}

std::vector<EdgeworthRow> read_edgeworth_csv(std::istream& in) {
  std::vector<EdgeworthRow> out;
  for (const auto& row : read_table(in, "l,exact,f0,f2,f4")) {
    expect_fields(row, 5);
    out.push_back(EdgeworthRow{parse_integer<std::int64_t>(row[0]), parse_double(row[1]),
                               parse_double(row[2]), parse_double(row[3]), parse_double(row[4])});
  }
  return out;
}

void write_samples(std::ostream& out, const std::vector<Sample>& samples) {
  for (const auto& s : samples) out << format_units(s.included) << '\n';
}

std::vector<std::vector<UnitIndex>> read_samples(std::istream& in) {
  std::vector<std::vector<UnitIndex>> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(parse_units(line));
  return out;
}

std::vector<ArratiaRow> arratia_rows(const ArratiaExample& example) {
  std::vector<ArratiaRow> rows;
  for (double eps : arratia_eps_grid()) {
    rows.push_back(ArratiaRow{example.N, example.n, example.d_over_N, example.N_over_d, eps,
                              example.window_fraction(eps)});
  }
  return rows;
}

void write_arratia_csv(std::ostream& out, const std::vector<ArratiaRow>& rows) {
  out << "N,n,d_over_N,N_over_d,eps,window_fraction\n";
  for (const auto& r : rows) {
    out << r.N << ',' << r.n << ',' << format_double(r.d_over_N) << ','
        << format_double(r.N_over_d) << ',' << format_double(r.eps) << ','
        << format_double(r.window_fraction) << '\n';
  }
}

std::vector<ArratiaRow> read_arratia_csv(std::istream& in) {
  std::vector<ArratiaRow> out;
  for (const auto& row : read_table(in, "N,n,d_over_N,N_over_d,eps,window_fraction")) {
    expect_fields(row, 6);
    out.push_back(ArratiaRow{parse_integer<std::size_t>(row[0]),
                             parse_integer<std::size_t>(row[1]), parse_double(row[2]),
                             parse_double(row[3]), parse_double(row[4]), parse_double(row[5])});
  }
  return out;
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace rejective
