#include <doctest.h>

#include <cmath>

#include "rejective/asymptotic.hpp"
#include "rejective/error.hpp"
#include "rejective/family.hpp"
#include "support.hpp"

using namespace rejective;

TEST_CASE("closed-form approximations") {
  CHECK(hajek_second_order(0.5, 0.5, 10.0) == doctest::Approx(0.25 * (1 - 0.025)).epsilon(1e-15));
  const double pi[] = {0.2, 0.5, 0.6};
  // (0.8*0.5 + 0.8*0.4 + 0.5*0.4) = 0.92
  CHECK(theorem1_pi(pi, 4.0) == doctest::Approx(0.06 * (1 - 0.92 / 4.0)).epsilon(1e-14));
  const double two[] = {0.3, 0.7};
  CHECK(theorem1_pi(two, 5.0) == hajek_second_order(0.3, 0.7, 5.0));
}

TEST_CASE("approximation reports carry the exact value") {
  const Design d = linear_design(60, 20);
  const ExactOracle oracle(d);
  const UnitIndex units[] = {3, 40, 17};
  const auto r = theorem1_p(oracle, units);
  CHECK(r.units == std::vector<UnitIndex>{3, 17, 40});
  REQUIRE(r.exact_value.has_value());
  CHECK(*r.exact_value == oracle.inclusion(units));
  CHECK(r.abs_error == std::abs(r.approx_value - *r.exact_value));
  CHECK(r.rel_error < 0.05);
  CHECK(r.formula == Method::Theorem1P);
  CHECK(r.d == design_stats(d).d);

  const auto q = theorem1_pi_report(oracle, units);
  CHECK(q.formula == Method::Theorem1Pi);
  CHECK(q.abs_error < 0.05 * *q.exact_value);
  const UnitIndex single[] = {3};
  CHECK_THROWS_AS(theorem1_p(oracle, single), Error);
}

TEST_CASE("first-order relation approaches the exact pi") {
  double previous = 0.0;
  for (std::size_t N : {50, 100, 200, 400}) {
    const Design d = linear_design(N, N / 4);
    const auto exact = ExactOracle(d).first_order();
    const auto approx = first_order_relation(d);
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) worst = std::max(worst, std::abs(exact[i] - approx[i]));
    if (previous > 0.0) CHECK(worst < previous / 2.5);
    previous = worst;
  }
}

TEST_CASE("calibrate_design") {
  SUBCASE("equal targets need no iteration") {
    const std::vector<double> target(20, 0.25);
    const auto cal = calibrate_design(target, 5, 1e-12, 50);
    CHECK(cal.iterations == 0);
    CHECK(cal.residual <= 1e-12);
  }
  SUBCASE("heterogeneous targets") {
    const Design ref = linear_design(80, 24);
    const std::vector<double> target(ref.p().begin(), ref.p().end());
    const auto cal = calibrate_design(target, 24, 1e-12, 200);
    CHECK(cal.residual <= 1e-12);
    const auto pi = ExactOracle(cal.design).first_order();
    for (std::size_t i = 0; i < pi.size(); ++i) CHECK(std::abs(pi[i] - target[i]) <= 1e-12);
  }
  SUBCASE("errors") {
    try {
      calibrate_design(std::vector<double>{0.5, 1.2, 0.3}, 2, 1e-10, 10);
      FAIL("expected InfeasibleTarget");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleTarget);
    }
    try {
      calibrate_design(std::vector<double>{0.5, 0.5, 0.3}, 2, 1e-10, 10);
      FAIL("expected InfeasibleTarget");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InfeasibleTarget);
    }
    const Design ref = linear_design(30, 10);
    try {
      calibrate_design(std::vector<double>(ref.p().begin(), ref.p().end()), 10, 1e-14, 1);
      FAIL("expected NoConvergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoConvergence);
    }
  }
}

TEST_CASE("log-log fit") {
  std::vector<ScalingPoint> pts;
  for (double d : {10.0, 20.0, 40.0, 80.0, 160.0}) pts.push_back({0, d, 3.0 * std::pow(d, -2.0)});
  const auto fit = fit_loglog(pts);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit.slope_stderr < 1e-10);
  CHECK(fit.span_decades == doctest::Approx(std::log10(16.0)).epsilon(1e-12));

  pts.push_back({0, 320.0, 0.0});
  CHECK(fit_loglog(pts).slope == doctest::Approx(-2.0).epsilon(1e-12));
  pts.resize(3);
  CHECK_THROWS_AS(fit_loglog(pts), Error);
}

TEST_CASE("error scaling studies on small families") {
  std::vector<Design> equal, linear;
  for (std::size_t N : {32, 64, 128, 256}) {
    equal.push_back(equal_design(N, N / 4));
    linear.push_back(linear_design(N, N / 4));
  }
  const StudyOptions options{2000, 7, 2};
  for (auto formula : {Method::Theorem1P, Method::Theorem1Pi, Method::Hajek2}) {
    const auto s = error_scaling_study(linear, "linear", 2, formula, options);
    CHECK(s.points.size() == 4);
    CHECK(s.fitted_slope < -1.6);
    CHECK(s.fitted_slope > -2.4);
    CHECK(s.coverage.front() == "exhaustive:496");
  }
  const auto s3 = error_scaling_study(equal, "equal", 3, Method::Theorem1Pi, options);
  CHECK(s3.fitted_slope == doctest::Approx(-2.0).epsilon(0.2));
  const auto t3 = error_scaling_study(linear, "linear", 3, Method::Theorem1Pi, options);
  CHECK(t3.fitted_slope == doctest::Approx(-2.0).epsilon(0.2));
  CHECK(t3.coverage.back() == "sampled:2000+2:seed=7");

  // Worker count does not change the result.
  const auto w1 = error_scaling_study(linear, "linear", 3, Method::Theorem1P, {500, 1, 1});
  const auto w4 = error_scaling_study(linear, "linear", 3, Method::Theorem1P, {500, 1, 4});
  CHECK(w1.fitted_slope == w4.fitted_slope);

  CHECK_THROWS_AS(error_scaling_study(linear, "linear", 3, Method::Hajek2, options), Error);
  CHECK_THROWS_AS(error_scaling_study(std::span(linear).first(1), "one", 2, Method::Theorem1Pi, options),
                  Error);
}
