#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otlab/transport1d.hpp"

using namespace otlab;
using namespace otlab::measures;
using namespace otlab::transport1d;

TEST_CASE("gaussian to gaussian is the identity") {
  const auto g = Potential::gaussian(1);
  const auto T = build_map_1d(g, g);
  for (double x : {-3.0, -0.5, 0.0, 1.7}) {
    CHECK(T.map(x) == doctest::Approx(x).epsilon(1e-8));
    CHECK(T.derivative(x) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("uniform scaling map") {
  const auto u01 = Potential::uniform_body(ConvexBody::box({0.0}, {1.0}));
  const auto u02 = Potential::uniform_body(ConvexBody::box({0.0}, {2.0}));
  const auto T = build_map_1d(u01, u02);
  for (double x : {0.1, 0.5, 0.9}) {
    CHECK(T.map(x) == doctest::Approx(2 * x).epsilon(1e-10));
    CHECK(T.derivative(x) == doctest::Approx(2.0).epsilon(1e-10));
  }
}

TEST_CASE("gaussian to uniform closed form") {
  const auto g = Potential::gaussian(1);
  const double a = 1.5;
  const auto uni = Potential::uniform_body(ConvexBody::box({-a}, {a}));
  const auto T = build_map_1d(g, uni);
  for (double x : {-2.0, -0.3, 0.0, 0.8, 2.5})
    CHECK(T.map(x) == doctest::Approx(a * (2 * normal_cdf(x) - 1)).epsilon(1e-9));
  CHECK(T.derivative(0.0) == doctest::Approx(a * std::sqrt(2 / kPi)).epsilon(1e-10));
}

TEST_CASE("monotonicity and pushforward of the constructed map") {
  const auto g = Potential::gaussian(1);
  const auto p4 = Potential::power_law(1, 4);
  const auto T = build_map_1d(g, p4);
  double prev = -1e300;
  for (int i = 0; i < 200; ++i) {
    const double x = -4.0 + 8.0 * i / 199.0;
    const double y = T.map(x);
    CHECK(y >= prev);
    prev = y;
  }
  // pushforward: F_nu(c) = F_mu(T^{-1}(c)) for 256 thresholds
  for (int k = 0; k < 256; ++k) {
    const double c = p4.quantile1(1e-5 + (1 - 2e-5) * k / 255.0);
    CHECK(p4.cdf1(c) == doctest::Approx(g.cdf1(T.inverse(c))).epsilon(1e-6));
  }
}

TEST_CASE("change of variables matches finite differences") {
  const auto g = Potential::gaussian(1);
  const auto p4 = Potential::power_law(1, 4);
  const auto T = build_map_1d(g, p4);
  for (double x : {-1.5, -0.2, 0.0, 0.4, 1.9}) {
    const double h = 1e-5;
    const double fd = (T.map(x + h) - T.map(x - h)) / (2 * h);
    CHECK(T.derivative(x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("composition consistency") {
  const auto g = Potential::gaussian(1);
  const auto p4 = Potential::power_law(1, 4);
  const auto h = Potential::huber_product(1);
  const auto T_gp = build_map_1d(g, p4);
  const auto T_ph = build_map_1d(p4, h);
  const auto T_gh = build_map_1d(g, h);
  for (double x : {-2.0, -0.7, 0.0, 1.1, 2.3})
    CHECK(T_ph.map(T_gp.map(x)) == doctest::Approx(T_gh.map(x)).epsilon(1e-6));
}

TEST_CASE("derivative signals the target boundary") {
  const auto g = Potential::gaussian(1);
  const auto uni = Potential::uniform_body(ConvexBody::box({-1.0}, {1.0}));
  const auto T = build_map_1d(g, uni);
  CHECK_THROWS_AS(T.derivative(1e9), TargetBoundaryError);
}

TEST_CASE("theorem constant formula and validation") {
  auto c = theorem1_constant(1, 1, 1, 1);
  CHECK(c.constant == doctest::Approx(1.0));
  CHECK(c.alpha == doctest::Approx(1.0));
  c = theorem1_constant(1, 3, 1, 1);
  CHECK(c.constant == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-12));
  CHECK(c.alpha == doctest::Approx(0.5));
  c = theorem1_constant(0, 1, 2, 1);
  CHECK(c.constant == doctest::Approx(2.0));
  CHECK(c.alpha == doctest::Approx(0.5));
  CHECK_THROWS_AS(theorem1_constant(1.5, 3, 1, 1), std::domain_error);
  CHECK_THROWS_AS(theorem1_constant(0.5, 0.8, 1, 1), std::domain_error);
  CHECK_THROWS_AS(theorem1_constant(1, 3, -1, 1), std::domain_error);
}

TEST_CASE("empirical holder of the identity map") {
  const auto g = Potential::gaussian(1);
  const auto T = build_map_1d(g, g);
  PairSpec spec;
  spec.n_pairs = 2048;
  const auto est = empirical_holder_1d(T, 1.0, spec, 12345);
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(est.y > est.x);
}

TEST_CASE("empirical holder supremum is monotone in the sample count") {
  const auto g = Potential::gaussian(1);
  const auto uni = Potential::uniform_body(ConvexBody::box({-1.0}, {1.0}));
  const auto T = build_map_1d(g, uni);
  PairSpec small, big;
  small.n_pairs = 512;
  small.refine_rounds = 0;
  big.n_pairs = 1024;
  big.refine_rounds = 0;
  const auto lo = empirical_holder_1d(T, 1.0, small, 777);
  const auto hi = empirical_holder_1d(T, 1.0, big, 777);
  CHECK(hi.value >= lo.value);  // same stream prefix, larger candidate set
}

TEST_CASE("second quotient of the potential is nonnegative and even-ish") {
  const auto g = Potential::gaussian(1);
  const auto p4 = Potential::power_law(1, 4);
  const auto T = build_map_1d(g, p4);
  for (double x : {-1.0, 0.0, 2.0})
    for (double t : {0.1, 0.5, 2.0}) CHECK(T.potential_second_quotient(x, t) >= 0);
  CHECK(T.potential_second_quotient(0.5, 0.0) == 0.0);
}

TEST_CASE("degenerate pair spec raises") {
  const auto g = Potential::gaussian(1);
  const auto T = build_map_1d(g, g);
  PairSpec bad;
  bad.t_min = 1.0;
  bad.t_max = 0.5;
  CHECK_THROWS_AS(empirical_holder_1d(T, 1.0, bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(empirical_holder_1d(T, 1.5, PairSpec{}, 1), std::domain_error);
}

TEST_CASE("map csv has provenance-ready shape") {
  const auto g = Potential::gaussian(1);
  const auto T = build_map_1d(g, g);
  const auto csv = map_csv(T, 16);
  CHECK(csv.find("x,T,dT") == 0);
}
