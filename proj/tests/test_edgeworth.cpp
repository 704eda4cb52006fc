#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rejective/edgeworth.hpp"
#include "rejective/error.hpp"
#include "rejective/exact_oracle.hpp"
#include "rejective/family.hpp"
#include "support.hpp"

using namespace rejective;

// Reference values below come from an independent symbolic expansion of
// exp(sum_m kappa_m u^m / (m! d^{m/2})) in powers of d^{-1/2}, with u^q
// replaced by the probabilists' Hermite polynomial He_q.

TEST_CASE("Hermite polynomials") {
  const auto h = hermite(30);
  CHECK(h.coeffs[0] == IntPoly{1});
  CHECK(h.coeffs[1] == IntPoly{0, 1});
  CHECK(h.coeffs[3] == IntPoly{0, -3, 0, 1});
  CHECK(h(4, 0.0) == 3.0);
  CHECK(h(6, 0.0) == -15.0);
  CHECK(h(5, 0.0) == 0.0);
  for (std::size_t j = 0; 2 * j + 1 <= 30; ++j) CHECK(h(2 * j + 1, 0.0) == 0.0);
  CHECK(hermite_derivative_form(30).coeffs == h.coeffs);
  CHECK_THROWS_AS(hermite(31), Error);
  // H_{k+1} = x H_k - k H_{k-1} at a non-trivial point.
  for (std::size_t k = 1; k < 20; ++k) {
    const double x = 1.3;
    CHECK(h(k + 1, x) == doctest::Approx(x * h(k, x) - static_cast<double>(k) * h(k - 1, x)).epsilon(1e-12));
  }
}

TEST_CASE("Bernoulli cumulant polynomials") {
  CHECK(bernoulli_cumulant_poly(1).e == IntPoly{0, 1});
  CHECK(bernoulli_cumulant_poly(2).R == IntPoly{1});
  CHECK(bernoulli_cumulant_poly(3).R == IntPoly{1, -2});
  CHECK(bernoulli_cumulant_poly(4).R == IntPoly{1, -6, 6});
  CHECK(bernoulli_cumulant_poly(2).e == IntPoly{0, 1, -1});
  for (std::size_t m = 2; m <= 16; ++m) {
    const auto poly = bernoulli_cumulant_poly(m);
    CHECK(poly.R.size() <= m);
    // e_m = (p - p^2) R_m as integer polynomials.
    IntPoly product(poly.R.size() + 2, 0);
    for (std::size_t i = 0; i < poly.R.size(); ++i) {
      product[i + 1] += poly.R[i];
      product[i + 2] -= poly.R[i];
    }
    while (product.size() > 1 && product.back() == 0) product.pop_back();
    CHECK(product == poly.e);
  }
}

TEST_CASE("cumulants of K") {
  const Design c = validate_design({0.1, 0.2, 0.3, 0.4}, 1);
  const auto k = cumulants(c, 6);
  CHECK(k[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k[2] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(k[3] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(k[4] == doctest::Approx(-0.1124).epsilon(1e-14));
  CHECK(k[5] == doctest::Approx(-0.312).epsilon(1e-14));
  CHECK(k[6] == doctest::Approx(-0.0128).epsilon(1e-12));

  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t N = 5 + rng.below(100);
    const Design d = support::random_design(rng, N, 1 + rng.below(N - 1));
    const auto kap = cumulants(d, 8);
    CHECK(kap[1] == doctest::Approx(static_cast<double>(d.sample_size())).epsilon(1e-12));
    CHECK(kap[2] == design_stats(d).d);
    // Third and fourth cumulants from the central moments of the exact law.
    const auto law = pmf(d);
    const double mean = law.mean();
    double m2 = 0, m3 = 0, m4 = 0;
    for (std::size_t l = 0; l < law.probs.size(); ++l) {
      const double x = static_cast<double>(l) - mean;
      m2 += law.probs[l] * x * x;
      m3 += law.probs[l] * x * x * x;
      m4 += law.probs[l] * x * x * x * x;
    }
    CHECK(std::abs(kap[3] - m3) <= 1e-9 * (1 + std::abs(m3)));
    CHECK(std::abs(kap[4] - (m4 - 3 * m2 * m2)) <= 1e-8 * (1 + m4));
    // |kappa_m| <= sup |R_m| * d.
    for (std::size_t m = 3; m <= 8; ++m) {
      const auto poly = bernoulli_cumulant_poly(m);
      double sup = 0.0;
      for (int g = 0; g <= 1000; ++g) sup = std::max(sup, std::abs(evaluate(poly.R, g / 1000.0)));
      CHECK(std::abs(kap[m]) <= sup * kap[2] * (1 + 1e-12));
    }
  }
}

TEST_CASE("partition solutions") {
  const std::size_t counts[] = {1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77};
  for (std::size_t j = 1; j <= 12; ++j) {
    const auto set = partition_solutions(j);
    CHECK(set.solutions.size() == counts[j - 1]);
    for (const auto& s : set.solutions) {
      std::size_t weight = 0, r = 0;
      for (std::size_t m = 1; m <= j; ++m) {
        weight += m * s.k[m - 1];
        r += s.k[m - 1];
      }
      CHECK(weight == j);
      CHECK(r == s.r);
    }
  }
  const auto two = partition_solutions(2);
  CHECK(two.solutions[0].k == std::vector<std::size_t>{2, 0});
  CHECK(two.solutions[1].k == std::vector<std::size_t>{0, 1});
  const auto three = partition_solutions(3);
  CHECK(three.solutions[0].k == std::vector<std::size_t>{3, 0, 0});
  CHECK(three.solutions[1].k == std::vector<std::size_t>{1, 1, 0});
  CHECK(three.solutions[2].k == std::vector<std::size_t>{0, 0, 1});
  CHECK_THROWS_AS(partition_solutions(0), Error);
}

TEST_CASE("Edgeworth terms against the symbolic expansion") {
  const Design a = validate_design({0.2, 0.4, 0.6, 0.8}, 2);
  const auto ka = cumulants(a, 6);
  CHECK(edgeworth_term(ka, 0.8, 2, 0.0) == doctest::Approx(-0.03875).epsilon(1e-13));
  CHECK(edgeworth_term(ka, 0.8, 4, 0.0) == doctest::Approx(0.00433203125).epsilon(1e-13));
  CHECK(edgeworth_term(ka, 0.8, 2, 0.7) == doctest::Approx(-0.0038762916666666667).epsilon(1e-12));
  CHECK(edgeworth_term(ka, 0.8, 4, 0.7) == doctest::Approx(-0.0034201052043741319).epsilon(1e-12));
  CHECK(std::abs(edgeworth_term(ka, 0.8, 1, 0.7)) <= 1e-15);

  const Design c = validate_design({0.1, 0.2, 0.3, 0.4}, 1);
  const auto kc = cumulants(c, 6);
  const double expected07[] = {-0.15000119047146640, 0.010127867103984451, 0.017563941712981252,
                               -0.017920272464605048};
  const double expected13[] = {0.14539102297831945, 0.12489267759961127, 0.062688976463134967,
                               0.033834907820085168};
  for (std::size_t j = 1; j <= 4; ++j) {
    CHECK(edgeworth_term(kc, 0.7, j, 0.7) == doctest::Approx(expected07[j - 1]).epsilon(1e-12));
    CHECK(edgeworth_term(kc, 0.7, j, -1.3) == doctest::Approx(expected13[j - 1]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(edgeworth_term(cumulants(c, 4), 0.7, 3, 0.0), Error);
}

TEST_CASE("Edgeworth densities") {
  const Design a = validate_design({0.2, 0.4, 0.6, 0.8}, 2);
  const EdgeworthApproximation ea(a);
  CHECK(ea.density(2, 0) == doctest::Approx(0.44603102903819278).epsilon(1e-14));
  CHECK(ea.density(2, 2) == doctest::Approx(0.42874732666296281).epsilon(1e-13));
  CHECK(ea.density(2, 4) == doctest::Approx(0.43067954701922592).epsilon(1e-13));
  CHECK(ea.density(1, 4) == doctest::Approx(0.24632418859194269).epsilon(1e-13));

  const Design c = validate_design({0.1, 0.2, 0.3, 0.4}, 1);
  CHECK(edgeworth_pmf_approx(c, 0, 2) == doctest::Approx(0.29709900288317919).epsilon(1e-13));
  CHECK(edgeworth_pmf_approx(c, 0, 4) == doctest::Approx(0.31272146548840860).epsilon(1e-13));
  CHECK(edgeworth_pmf_approx(c, 2, 4) == doctest::Approx(0.21513961628067485).epsilon(1e-13));
  CHECK_THROWS_AS(edgeworth_pmf_approx(c, 2, 5), Error);
  CHECK_THROWS_AS(edgeworth_pmf_approx(c, 5, 2), Error);

  // Higher orders approach the exact law on a large design.
  const Design big = linear_design(400, 100);
  const auto law = pmf(big);
  const EdgeworthApproximation eb(big);
  const double e0 = std::abs(law.at(100) - eb.density(100, 0));
  const double e4 = std::abs(law.at(100) - eb.density(100, 4));
  CHECK(e4 < e0 / 10.0);
}

TEST_CASE("Lemma 1 constants") {
  const Design half = validate_design({0.5, 0.5, 0.5, 0.5}, 2);
  CHECK(lemma1_c1(design_stats(half)) == -0.0625);
  const UnitIndex one[] = {0}, two[] = {0, 1};
  CHECK(lemma1_constants(half, one).c2 == doctest::Approx(-0.0625).epsilon(1e-15));
  CHECK(lemma1_constants(half, two).c2 == doctest::Approx(-0.3125).epsilon(1e-15));
  CHECK(lemma1_constants(half, {}).c2 == lemma1_constants(half, {}).c1);

  Rng rng(32);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t N = 6 + rng.below(50);
    const Design d = support::random_design(rng, N, 1 + rng.below(N - 1));
    const std::vector<UnitIndex> units = {0, 2, 5};
    const auto c = lemma1_constants(d, units);
    const auto s = design_stats(d);
    const double k = 3.0;
    const double identity = 0.5 * (c.B2 - (c.B1 - k) * (c.B1 - k)) - 0.5 * (c.B1 - k) * (1 - 2 * s.p_bb);
    CHECK(c.c2 - c.c1 == doctest::Approx(identity).epsilon(1e-12));
    CHECK(c.d_tilde == doctest::Approx(s.d - c.B2).epsilon(1e-14));
    CHECK(c.d_tilde > 0.0);
  }
  const Design tiny = validate_design({0.5, 0.5, 1.0}, 2);
  const UnitIndex both[] = {0, 1};
  CHECK_THROWS_AS(lemma1_constants(tiny, both), Error);
}

TEST_CASE("Lemma 1 remainders shrink like d^-2") {
  std::vector<double> r1, r2;
  for (std::size_t N : {64, 128, 256, 512}) {
    const Design d = linear_design(N, N / 3);
    const double dd = design_stats(d).d;
    const double scale = std::sqrt(2.0 * std::numbers::pi * dd);
    const auto c = lemma1_constants(d, std::vector<UnitIndex>{1, N / 2});
    r1.push_back(scale * pmf(d).at(d.sample_size()) - 1.0 - c.c1 / dd);
    const UnitIndex pair[] = {1, N / 2};
    r2.push_back(scale * pmf_excluding(d, pair).at(d.sample_size() - 2) - 1.0 - c.c2 / dd);
  }
  for (std::size_t i = 0; i + 1 < r1.size(); ++i) {
    CHECK(std::abs(r1[i + 1] / r1[i]) == doctest::Approx(0.25).epsilon(0.4));
    CHECK(std::abs(r2[i + 1] / r2[i]) == doctest::Approx(0.25).epsilon(0.4));
  }
}
