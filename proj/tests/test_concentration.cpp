#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otlab/concentration.hpp"
#include "otlab/rng.hpp"

using namespace otlab;
using namespace otlab::measures;
using namespace otlab::concentration;

TEST_CASE("base set distances in the three norms") {
  const auto hs = BaseSet::half_space({2.0, 0.0}, 2.0);  // x1 <= 1
  CHECK(hs.distance(Vec{0.0, 5.0}, Norm::L2) == doctest::Approx(0.0));
  CHECK(hs.distance(Vec{3.0, 0.0}, Norm::L2) == doctest::Approx(2.0));
  CHECK(hs.distance(Vec{3.0, 0.0}, Norm::L1) == doctest::Approx(2.0));
  CHECK(hs.distance(Vec{3.0, 0.0}, Norm::Linf) == doctest::Approx(2.0));
  const auto diag = BaseSet::half_space({1.0, 1.0}, 0.0);
  CHECK(diag.distance(Vec{1.0, 1.0}, Norm::L2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(diag.distance(Vec{1.0, 1.0}, Norm::L1) == doctest::Approx(2.0));
  CHECK(diag.distance(Vec{1.0, 1.0}, Norm::Linf) == doctest::Approx(1.0));
  const auto ball = BaseSet::ball({0.0, 0.0}, 1.0);
  CHECK(ball.distance(Vec{3.0, 0.0}, Norm::L2) == doctest::Approx(2.0));
  CHECK(ball.distance(Vec{1.0, 1.0}, Norm::L1) == doctest::Approx(1.0));
}

TEST_CASE("enlargement probability of a gaussian half-space") {
  const auto g = Potential::gaussian(1);
  for (double r : {0.0, 0.5, 2.0}) {
    EnlargementQuery q;
    q.set = BaseSet::half_space({1.0}, 0.0);
    q.r = r;
    q.sample_count = 200000;
    q.seed = 44;
    const auto est = enlargement_probability(g, q, 1);
    CHECK(est.ci_halfwidth < 0.01);
    CHECK(std::abs(est.value - normal_cdf(r)) < est.ci_halfwidth + 1e-3);
  }
  EnlargementQuery sat;
  sat.set = BaseSet::half_space({1.0}, 0.0);
  sat.r = 10.0;
  sat.sample_count = 50000;
  sat.seed = 1;
  CHECK(enlargement_probability(g, sat, 1).value == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("profile and exponential bounds") {
  ConvexityModulus quad;  // delta(s) = s^2, uniform grid hitting the queries
  quad.kind = ModulusKind::Delta;
  quad.norm = Norm::L2;
  for (int i = 0; i <= 320; ++i) quad.grid.push_back(8.0 * i / 320.0);
  for (double t : quad.grid) quad.values.push_back(t * t);
  for (double r : {0.8, 2.0, 6.0})
    CHECK(ms_profile_bound(0.5, r, quad) ==
          doctest::Approx(normal_cdf(r / 16.0)).epsilon(1e-9));
  CHECK(ms_profile_bound(0.33, 0.0, quad) == doctest::Approx(0.33));
  CHECK(ms_exp_bound(true, 8.0, quad) ==
        doctest::Approx(1 - 0.5 * std::exp(-1.0 / 8.0)).epsilon(1e-12));
  CHECK(ms_exp_bound(true, 0.0, quad) == doctest::Approx(0.5));

  ConvexityModulus quart;  // delta(s) = 2 s^4
  quart.kind = ModulusKind::Delta;
  quart.norm = Norm::L2;
  quart.grid = quad.grid;
  for (double t : quart.grid) quart.values.push_back(2 * t * t * t * t);
  CHECK(ms_profile_bound(0.5, 8.0, quart) ==
        doctest::Approx(normal_cdf(0.5 * std::sqrt(2.0))).epsilon(1e-9));
  CHECK_THROWS_AS(ms_exp_bound(false, 1.0, quad), std::domain_error);
  CHECK_THROWS_AS(ms_profile_bound(0.5, 100.0, quad), std::domain_error);

  // consistency: exp bound <= profile bound at nu(A) = 1/2 (gaussian tail bound)
  for (double r : {0.5, 2.0, 6.0})
    CHECK(ms_exp_bound(true, r, quad) <= ms_profile_bound(0.5, r, quad) + 1e-12);
}

TEST_CASE("gaussian tail inequality on a grid") {
  for (int i = 0; i <= 600; ++i) {
    const double t = 6.0 * i / 600.0;
    CHECK(normal_cdf(t) - (1 - 0.5 * std::exp(-0.5 * t * t)) >= -1e-12);
  }
}

TEST_CASE("transport-entropy inequality: trivial, shift, variance cases") {
  const auto g = Potential::gaussian(1);
  const Density1D& nu = g.density1d();
  ModulusFn b = [](double t) { return 0.5 * t * t; };
  {  // f == 1: both sides zero
    PerturbedDensity1D f(nu, [](double) { return 0.0; }, [](double) { return 0.0; });
    const auto r = talagrand_check(nu, f, Norm::L2, b, 1e-4, "trivial", "d");
    CHECK(r.passed);
    CHECK(std::abs(r.empirical) < 1e-10);
    CHECK(std::abs(r.theoretical) < 1e-10);
  }
  {  // shift by m: both sides m^2/2 exactly
    const double m = 0.8;
    PerturbedDensity1D f(nu, [m](double x) { return m * x - 0.5 * m * m; },
                         [m](double) { return m; });
    const auto r = talagrand_check(nu, f, Norm::L2, b, 1e-4, "shift", "d");
    CHECK(r.passed);
    CHECK(r.empirical == doctest::Approx(0.5 * m * m).epsilon(1e-7));
    CHECK(std::abs(r.empirical - r.theoretical) < 1e-6);
  }
  {  // variance 1/2: strict inequality with positive margin
    PerturbedDensity1D f(nu, [](double x) { return -0.5 * x * x; },
                         [](double x) { return -x; });
    const auto r = talagrand_check(nu, f, Norm::L2, b, 1e-4, "var", "d");
    CHECK(r.passed);
    // KL(N(0,1/2) || N(0,1)) = (ln 2 - 1/2)/2; transport cost = b(x(1-1/sqrt2)) integrated
    CHECK(r.theoretical ==
          doctest::Approx(0.5 * (std::log(2.0) - 0.5)).epsilon(1e-8));
    const double w = 1.0 - 1.0 / std::sqrt(2.0);
    CHECK(r.empirical == doctest::Approx(0.5 * w * w).epsilon(1e-7));
    CHECK(r.empirical < r.theoretical);
  }
}

TEST_CASE("modified log-sobolev: trivial, tilt, quartic bump") {
  const auto g = Potential::gaussian(1);
  const Density1D& nu = g.density1d();
  ModulusFn b = [](double t) { return 0.5 * t * t; };
  const auto bc = conjugate_fn(b, 64.0);
  CHECK(bc(0.3) == doctest::Approx(0.045).epsilon(1e-9));  // self-conjugate
  {
    PerturbedDensity1D f(nu, [](double) { return 0.0; }, [](double) { return 0.0; });
    const auto r = mlsi_check(nu, f, Norm::L2, bc, 1e-4, "trivial", "d");
    CHECK(r.passed);
    CHECK(std::abs(r.empirical) < 1e-10);
  }
  {
    const double eps = 0.1;
    PerturbedDensity1D f(nu, [eps](double x) { return eps * x; },
                         [eps](double) { return eps; });
    const auto r = mlsi_check(nu, f, Norm::L2, bc, 1e-4, "tilt", "d");
    CHECK(r.passed);
    CHECK(std::abs(r.empirical - r.theoretical) < 1e-6);
    CHECK(r.empirical == doctest::Approx(0.5 * eps * eps).epsilon(1e-6));
  }
  {
    const auto q = Potential::power_law(1, 4);
    const Density1D& nuq = q.density1d();
    ModulusFn bq = [](double t) { return t * t * t * t / 3.0; };
    const auto bqc = conjugate_fn(bq, 64.0);
    PerturbedDensity1D f(
        nuq, [](double x) { return 0.3 * std::tanh(x - 0.4); },
        [](double x) {
          const double th = std::tanh(x - 0.4);
          return 0.3 * (1 - th * th);
        });
    const auto rt = talagrand_check(nuq, f, Norm::L2, bq, 1e-4, "q-tal", "d");
    const auto rm = mlsi_check(nuq, f, Norm::L2, bqc, 1e-4, "q-mlsi", "d");
    CHECK(rt.passed);
    CHECK(rm.passed);
  }
}

TEST_CASE("marton enlargement bound") {
  ModulusFn b = [](double t) { return 0.5 * t * t; };
  {  // analytic gaussian half-space, r = 1
    const auto res =
        marton_check_values(0.5, 1.0 - normal_cdf(1.0), 0.0, 1.0, b, "m", "d");
    CHECK(res.displayed.passed);
    CHECK(res.displayed.empirical == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(res.displayed.theoretical ==
          doctest::Approx(1.0 / (0.5 * (1 - normal_cdf(1.0)))).epsilon(1e-9));
    CHECK(res.chain.passed);
    CHECK(res.chain.empirical == doctest::Approx(std::exp(0.25)).epsilon(1e-12));
  }
  {  // r = 0: e^0 = 1 <= 1/(nu(A) nu(A^c)) = 4
    const auto res = marton_check_values(0.5, 0.5, 0.0, 0.0, b, "m0", "d");
    CHECK(res.chain.passed);
    CHECK(res.chain.empirical == doctest::Approx(1.0));
    CHECK(res.chain.theoretical == doctest::Approx(4.0));
  }
  {  // monte carlo on the quartic measure
    const auto q = Potential::power_law(1, 4);
    ModulusFn bq = [](double t) { return t * t * t * t / 3.0; };
    const auto res =
        marton_check(q, BaseSet::half_space({1.0}, 0.0), 1.0, Norm::L2, bq,
                     200000, 5, 1, "mq", "d");
    CHECK(res.chain.passed);
    CHECK(res.displayed.passed);
  }
  {  // vacuous when the complement mass is inside the CI
    const auto res = marton_check_values(0.999, 1e-9, 1e-3, 1.0, b, "mv", "d");
    CHECK(res.chain.passed);
    CHECK(res.chain.vacuous);
  }
  CHECK_THROWS_AS(marton_check_values(0.2, 0.5, 0.0, 1.0, b, "bad", "d"),
                  std::domain_error);
}

TEST_CASE("ks distance") {
  Vec s;
  Rng rng(2);
  for (int i = 0; i < 20000; ++i) s.push_back(rng.normal());
  CHECK(ks_distance(s, [](double x) { return normal_cdf(x); }) < 0.015);
  CHECK(ks_distance(s, [](double x) { return normal_cdf(x - 0.5); }) > 0.1);
}

TEST_CASE("profile csv") {
  std::vector<ProfilePoint> pts{{0.5, 0.9, 0.6, 0.55, 0.001}};
  CHECK(profile_csv(pts).find("r,empirical,profile_bound,exp_bound,ci") == 0);
}
