#include "rejective/family.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rejective/compensated_sum.hpp"
#include "rejective/error.hpp"

namespace rejective {

namespace {

std::size_t sample_size_for(std::size_t N, double ratio) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(N)));
}

}  // namespace

Design equal_design(std::size_t N, std::size_t n) {
  if (N == 0) throw Error(ErrorCode::BadInput, "family size must be positive");
  const double p = static_cast<double>(n) / static_cast<double>(N);
  return validate_design(std::vector<double>(N, p), static_cast<std::int64_t>(n));
}

Design linear_design(std::size_t N, std::size_t n) {
  if (N == 0) throw Error(ErrorCode::BadInput, "family size must be positive");
  std::vector<double> w(N);
  for (std::size_t i = 0; i < N; ++i) {
    w[i] = 1.0 + static_cast<double>(i + 1) / static_cast<double>(N);
  }
  const double total = compensated_sum(w);
  for (double& v : w) v = static_cast<double>(n) * v / total;
  return validate_design(std::move(w), static_cast<std::int64_t>(n));
}

FamilySpec read_family_json(std::istream& in, const std::filesystem::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadInput, std::string("family JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::BadInput, "family JSON must be an object");
  for (const auto& item : doc.items()) {
    const auto& key = item.key();
    if (key != "kind" && key != "sizes" && key != "n_ratio" && key != "designs") {
      throw Error(ErrorCode::BadInput, "family JSON: unknown key '" + key + "'");
    }
  }
  FamilySpec spec;
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    throw Error(ErrorCode::BadInput, "family JSON: 'kind' must be a string");
  }
  const auto kind = doc["kind"].get<std::string>();
  if (kind == "equal") {
    spec.kind = FamilyKind::Equal;
  } else if (kind == "linear") {
    spec.kind = FamilyKind::Linear;
  } else if (kind == "file") {
    spec.kind = FamilyKind::File;
  } else {
    throw Error(ErrorCode::BadInput, "family JSON: unknown kind '" + kind + "'");
  }

  if (spec.kind == FamilyKind::File) {
    if (!doc.contains("designs") || !doc["designs"].is_array()) {
      throw Error(ErrorCode::BadInput, "family JSON: kind 'file' needs a 'designs' array");
    }
    for (const auto& v : doc["designs"]) {
      if (!v.is_string()) throw Error(ErrorCode::BadInput, "family JSON: design paths must be strings");
      std::filesystem::path path = v.get<std::string>();
      spec.designs.push_back(path.is_relative() ? base_dir / path : path);
    }
    return spec;
  }

  if (!doc.contains("sizes") || !doc["sizes"].is_array()) {
    throw Error(ErrorCode::BadInput, "family JSON: 'sizes' must be an array of integers");
  }
  for (const auto& v : doc["sizes"]) {
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
      throw Error(ErrorCode::BadInput, "family JSON: sizes must be positive integers");
    }
    spec.sizes.push_back(v.get<std::size_t>());
  }
  if (doc.contains("n_ratio")) {
    if (!doc["n_ratio"].is_number()) throw Error(ErrorCode::BadInput, "family JSON: 'n_ratio' must be a number");
    spec.n_ratio = doc["n_ratio"].get<double>();
  }
  if (!(spec.n_ratio > 0.0 && spec.n_ratio < 1.0)) {
    throw Error(ErrorCode::BadInput, "family JSON: 'n_ratio' must lie in (0,1)");
  }
  return spec;
}

FamilySpec read_family_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open family file " + path.string());
  return read_family_json(in, path.parent_path());
}

std::vector<Design> build_family(const FamilySpec& spec) {
  std::vector<Design> out;
  if (spec.kind == FamilyKind::File) {
    for (const auto& path : spec.designs) out.push_back(read_design_file(path));
    return out;
  }
  for (std::size_t N : spec.sizes) {
    const std::size_t n = sample_size_for(N, spec.n_ratio);
    out.push_back(spec.kind == FamilyKind::Equal ? equal_design(N, n) : linear_design(N, n));
  }
  return out;
}

std::string describe(const FamilySpec& spec) {
  std::ostringstream s;
  switch (spec.kind) {
    case FamilyKind::Equal: s << "equal"; break;
    case FamilyKind::Linear: s << "linear"; break;
    case FamilyKind::File: s << "file[" << spec.designs.size() << "]"; return s.str();
  }
  s << " n_ratio=" << spec.n_ratio << " sizes=";
  for (std::size_t i = 0; i < spec.sizes.size(); ++i) s << (i ? "/" : "") << spec.sizes[i];
  return s.str();
}

}  // namespace rejective
