#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rejective/design.hpp"

namespace rejective {

enum class FamilyKind { Equal, Linear, File };

/// A sequence of designs of growing size used by the scaling studies.
///   equal:  p_i = n/N
///   linear: p_i proportional to 1 + i/N (i = 1..N), scaled so sum p = n
///   file:   explicit design files
/// with n = round(n_ratio * N) for the generated kinds.
struct FamilySpec {
  FamilyKind kind = FamilyKind::Equal;
  std::vector<std::size_t> sizes;
  double n_ratio = 0.5;
  std::vector<std::filesystem::path> designs;
};

/// JSON: {"kind": "equal"|"linear"|"file", "sizes": [...], "n_ratio": r,
/// "designs": [paths]}. Relative design paths resolve against base_dir.
FamilySpec read_family_json(std::istream& in, const std::filesystem::path& base_dir = {});
FamilySpec read_family_file(const std::filesystem::path& path);

std::vector<Design> build_family(const FamilySpec& spec);
std::string describe(const FamilySpec& spec);

Design equal_design(std::size_t N, std::size_t n);
Design linear_design(std::size_t N, std::size_t n);

}  // namespace rejective
