#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "rejective/error.hpp"
#include "rejective/exact_oracle.hpp"
#include "rejective/family.hpp"
#include "support.hpp"

using namespace rejective;

TEST_CASE("pmf examples") {
  CHECK(pmf(validate_design({0.5, 0.5, 0.5, 0.5}, 2)).at(2) == 0.375);
  const auto law = pmf(validate_design({0.2, 0.4, 0.6, 0.8}, 2));
  CHECK(law.at(2) == doctest::Approx(0.4304).epsilon(1e-14));
  const auto forced = pmf(validate_design({1.0, 0.5, 0.5}, 2));
  REQUIRE(forced.probs.size() == 4);
  CHECK(forced.at(0) == 0.0);
  CHECK(forced.at(1) == 0.25);
  CHECK(forced.at(2) == 0.5);
  CHECK(forced.at(3) == 0.25);
}

TEST_CASE("pmf invariants") {
  Rng rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t N = 2 + rng.below(300);
    const Design d = support::random_design(rng, N, 1 + rng.below(N - 1));
    const auto law = pmf(d);
    CHECK(law.probs.size() == N + 1);
    CHECK(std::all_of(law.probs.begin(), law.probs.end(), [](double v) { return v >= 0.0; }));
    CHECK(std::abs(law.total() - 1.0) <= 1e-12);
    CHECK(std::abs(law.mean() - static_cast<double>(d.sample_size())) <= 1e-9);
    CHECK(std::abs(law.variance() - design_stats(d).d) <= 1e-9);
  }
}

TEST_CASE("pmf_excluding examples") {
  const Design d = validate_design({0.2, 0.4, 0.6, 0.8}, 2);
  const UnitIndex first[] = {0};
  CHECK(pmf_excluding(d, first).at(1) == doctest::Approx(0.296).epsilon(1e-14));
  CHECK(pmf_excluding(d, {}).probs == pmf(d).probs);
  const UnitIndex all[] = {0, 1, 2, 3};
  const auto point = pmf_excluding(d, all);
  REQUIRE(point.probs.size() == 1);
  CHECK(point.at(0) == 1.0);
  const UnitIndex dup[] = {1, 1};
  CHECK_THROWS_AS(pmf_excluding(d, dup), Error);
}

TEST_CASE("exact_inclusion examples") {
  const Design srs = validate_design({0.5, 0.5, 0.5, 0.5}, 2);
  const UnitIndex pair[] = {0, 1};
  CHECK(exact_inclusion(srs, pair).value == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(exact_inclusion(srs, pair).method == Method::ExactDp);

  const Design d = validate_design({0.2, 0.4, 0.6, 0.8}, 2);
  const UnitIndex first[] = {0};
  const double expected = 0.2 * 0.296 / 0.4304;
  CHECK(exact_inclusion(d, first).value == doctest::Approx(expected).epsilon(1e-14));
  CHECK(ExactOracle(d).inclusion(first) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.137546).epsilon(1e-6));

  const Design ten = validate_design(std::vector<double>(10, 0.4), 4);
  const UnitIndex triple[] = {0, 1, 2};
  CHECK(exact_inclusion(ten, triple).value == doctest::Approx(1.0 / 30.0).epsilon(1e-14));
  CHECK(ExactOracle(ten).inclusion(triple) == doctest::Approx(1.0 / 30.0).epsilon(1e-14));

  // More units than the sample size.
  const UnitIndex five[] = {0, 1, 2, 3, 4};
  CHECK(exact_inclusion(ten, five).value == 0.0);
  CHECK(ExactOracle(ten).inclusion(five) == 0.0);
  CHECK_THROWS_AS(exact_inclusion(ten, std::span<const UnitIndex>{}), Error);
}

TEST_CASE("exclusion pattern examples") {
  const Design srs = validate_design({0.5, 0.5, 0.5, 0.5}, 2);
  const ExactOracle oracle(srs);
  const UnitIndex in[] = {0}, out[] = {1};
  CHECK(oracle.exclusion_pattern(in, out) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(exact_exclusion_pattern(srs, in, out) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(oracle.exclusion_pattern(in, {}) == oracle.inclusion(in));
  CHECK(oracle.exclusion_pattern({}, {}) == 1.0);
  CHECK(exact_exclusion_pattern(srs, {}, {}) == 1.0);
  const UnitIndex overlap[] = {0};
  CHECK_THROWS_AS(oracle.exclusion_pattern(in, overlap), Error);
}

TEST_CASE("enumerate_rejective examples") {
  const auto srs = enumerate_rejective(validate_design({0.5, 0.5, 0.5, 0.5}, 2));
  REQUIRE(srs.samples.size() == 6);
  for (double v : srs.probs) CHECK(v == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

  const auto e = enumerate_rejective(validate_design({0.2, 0.4, 0.6, 0.8}, 2));
  const auto it = std::find(e.samples.begin(), e.samples.end(), 0b1100U);
  REQUIRE(it != e.samples.end());
  CHECK(e.probs[static_cast<std::size_t>(it - e.samples.begin())] ==
        doctest::Approx(0.2304 / 0.4304).epsilon(1e-14));

  try {
    enumerate_rejective(validate_design(std::vector<double>(25, 0.4), 10));
    FAIL("expected TooLarge");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::TooLarge);
  }
}

TEST_CASE("oracle equivalence with enumeration and brute force for N <= 12") {
  Rng rng(22);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t N = 3 + rng.below(10);
    const Design d = support::random_design(rng, N, 1 + rng.below(N - 1));
    const ExactOracle oracle(d);
    const auto en = enumerate_rejective(d);
    const support::BruteForce brute(d);
    CHECK(std::abs(compensated_sum(en.probs) - 1.0) <= 1e-12);
    CHECK(std::abs(oracle.size_probability() - static_cast<double>(brute.size_probability)) <= 1e-14);
    for (const auto& units : support::subsets_up_to(N, 4)) {
      const double fast = oracle.inclusion(units);
      CHECK(std::abs(fast - en.inclusion(units)) <= 1e-10);
      CHECK(std::abs(fast - brute.inclusion(units)) <= 1e-10);
      CHECK(std::abs(fast - exact_inclusion(d, units).value) <= 1e-12);
    }
  }
}

TEST_CASE("deterministic units are handled by shifting the target") {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t N = 4 + rng.below(6);
    const std::size_t n = 1 + rng.below(N - 1);
    const Design base = support::random_design(rng, N, n);
    std::vector<double> p(base.p().begin(), base.p().end());
    p.insert(p.begin() + static_cast<std::ptrdiff_t>(rng.below(p.size())), 1.0);
    p.insert(p.begin() + static_cast<std::ptrdiff_t>(rng.below(p.size())), 0.0);
    const Design d = validate_design(p, static_cast<std::int64_t>(n + 1));
    const ExactOracle oracle(d);
    const support::BruteForce brute(d);
    for (const auto& units : support::subsets_up_to(d.population_size(), 3)) {
      CHECK(std::abs(oracle.inclusion(units) - brute.inclusion(units)) <= 1e-12);
    }
    const auto table = oracle.pair_table();
    const std::size_t M = d.population_size();
    for (UnitIndex i = 0; i < M; ++i) {
      for (UnitIndex j = 0; j < M; ++j) {
        const std::vector<UnitIndex> u = i == j ? std::vector<UnitIndex>{i} : std::vector<UnitIndex>{i, j};
        CHECK(std::abs(table[i * M + j] - brute.inclusion(u)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("exact inclusion is symmetric in the order of units") {
  Rng rng(24);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t N = 10 + rng.below(60);
    const Design d = support::random_design(rng, N, 2 + rng.below(N - 4));
    const ExactOracle oracle(d);
    std::vector<UnitIndex> units(N);
    std::iota(units.begin(), units.end(), 0);
    std::shuffle(units.begin(), units.end(), rng);
    units.resize(2 + rng.below(3));
    const double a = oracle.inclusion(units);
    std::reverse(units.begin(), units.end());
    CHECK(oracle.inclusion(units) == a);
    std::shuffle(units.begin(), units.end(), rng);
    CHECK(oracle.inclusion(units) == a);
    CHECK(exact_inclusion(d, units).value == exact_inclusion(d, std::vector<UnitIndex>(units.rbegin(), units.rend())).value);
  }
}

TEST_CASE("monotonicity and the fixed sample size") {
  Rng rng(25);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t N = 5 + rng.below(200);
    const Design d = support::random_design(rng, N, 2 + rng.below(N - 3));
    const ExactOracle oracle(d);
    const auto pi = oracle.first_order();
    CHECK(std::abs(compensated_sum(pi) - static_cast<double>(d.sample_size())) <= 1e-9);
    std::vector<UnitIndex> units(N);
    std::iota(units.begin(), units.end(), 0);
    std::shuffle(units.begin(), units.end(), rng);
    for (std::size_t k = 1; k < std::min<std::size_t>(5, N); ++k) {
      const double big = oracle.inclusion(std::span(units).first(k + 1));
      const double small = oracle.inclusion(std::span(units).first(k));
      CHECK(big <= small * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("complement symmetry at p = 1/2 and n = N/2") {
  const Design d = validate_design(std::vector<double>(10, 0.5), 5);
  const auto e = enumerate_rejective(d);
  for (std::size_t s = 0; s < e.samples.size(); ++s) {
    const std::uint32_t complement = (~e.samples[s]) & 0x3FFU;
    const auto it = std::find(e.samples.begin(), e.samples.end(), complement);
    REQUIRE(it != e.samples.end());
    CHECK(e.probs[static_cast<std::size_t>(it - e.samples.begin())] == e.probs[s]);
  }
}

TEST_CASE("pair table, first order and pattern probabilities agree with single queries") {
  Rng rng(26);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t N = 20 + rng.below(80);
    const Design d = support::random_design(rng, N, 1 + rng.below(N - 1));
    const ExactOracle oracle(d);
    const auto pi = oracle.first_order();
    const auto table = oracle.pair_table(1);
    CHECK(table == oracle.pair_table(4));
    for (int t = 0; t < 50; ++t) {
      const UnitIndex i = rng.below(N), j = rng.below(N);
      const std::vector<UnitIndex> u = i == j ? std::vector<UnitIndex>{i} : std::vector<UnitIndex>{i, j};
      CHECK(std::abs(table[i * N + j] - oracle.inclusion(u)) <= 1e-14);
      CHECK(table[i * N + j] == table[j * N + i]);
    }
    for (UnitIndex i = 0; i < N; ++i) {
      const UnitIndex one[] = {i};
      CHECK(std::abs(pi[i] - oracle.inclusion(one)) <= 1e-15);
    }
    const UnitIndex units[] = {3, 0, 7};
    const auto patterns = oracle.pattern_probabilities(units);
    CHECK(std::abs(compensated_sum(patterns) - 1.0) <= 1e-12);
    const UnitIndex in[] = {3, 7}, out[] = {0};
    CHECK(std::abs(patterns[0b101] - oracle.exclusion_pattern(in, out)) <= 1e-15);
  }
}

TEST_CASE("SRSWOR closed forms at large N") {
  const std::size_t N = 1000, n = 300;
  const ExactOracle oracle(equal_design(N, n));
  for (std::size_t k = 1; k <= 4; ++k) {
    std::vector<UnitIndex> units;
    for (std::size_t j = 0; j < k; ++j) units.push_back(j * 97 + 5);
    const double want = support::srswor_inclusion(N, n, k);
    CHECK(std::abs(oracle.inclusion(units) - want) <= 1e-12 * want);
  }
  const auto table = oracle.pair_table();
  CHECK(std::abs(table[17 * N + 900] - support::srswor_inclusion(N, n, 2)) <= 1e-13);
}
