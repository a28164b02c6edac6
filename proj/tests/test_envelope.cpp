#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otlab/envelope.hpp"
#include "otlab/measures.hpp"
#include "otlab/transport1d.hpp"

using namespace otlab;
using namespace otlab::envelope;

TEST_CASE("psi closed-form anchors") {
  // p = 1, t = 0: int_0^1 r dr/sqrt(1-r^2) = 1 (antiderivative -sqrt(1-r^2))
  CHECK(psi(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(psi(1.0, 1.0) == doctest::Approx(0.0));
  CHECK(psi(1.0, -0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(psi(0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(psi(1.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(psi(0.5, -0.5), std::domain_error);
}

TEST_CASE("psi_inverse round trip") {
  CHECK(psi_inverse(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(psi_inverse(0.0, 2.0) == doctest::Approx(1.0));
  CHECK(psi_inverse(0.0, -0.5) == doctest::Approx(1.0));
  for (double p : {0.25, 1.0, 2.0}) {
    for (double s_frac : {0.1, 0.5, 0.9}) {
      const double s = s_frac * psi(0.0, p);
      CHECK(psi(psi_inverse(s, p), p) == doctest::Approx(s).epsilon(1e-10));
    }
  }
  for (double s_frac : {0.2, 0.8}) {
    const double s_max = sine_power_integral(-1.0 - 1.0 / -0.5, 0.0);
    const double s = s_frac * s_max;
    CHECK(psi(psi_inverse(s, -0.5), -0.5) == doctest::Approx(s).epsilon(1e-10));
  }
  CHECK_THROWS_AS(psi_inverse(100.0, 1.0), std::domain_error);
}

TEST_CASE("f0 from the slab half-width") {
  CHECK(f0_from_a(1.0, 0.0) == doctest::Approx(std::sqrt(2 / kPi)).epsilon(1e-12));
  CHECK(f0_from_a(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  // p = 1/4: 0.5 / int sin^4 = 0.5/(3 pi/16)
  CHECK(f0_from_a(1.0, 0.25) == doctest::Approx(0.5 / (3 * kPi / 16)).epsilon(1e-10));
  CHECK_THROWS_AS(f0_from_a(1.0, -1.0), std::domain_error);
  CHECK_THROWS_AS(f0_from_a(0.0, 1.0), std::domain_error);
}

TEST_CASE("envelope boundary, evenness, monotonicity, ODE residual") {
  for (double p : {-0.5, 0.0, 0.25, 1.0, 2.0}) {
    const EnvelopeFunction f(p, 1.0);
    CHECK(f.value(0.0) == doctest::Approx(f.f0()).epsilon(1e-10));
    CHECK(std::abs(f.value(1.0)) <= 1e-8);
    CHECK(std::abs(f.value(-1.0)) <= 1e-8);
    double prev = f.value(0.0);
    for (double t = 0.05; t <= 0.95; t += 0.05) {
      CHECK(f.value(t) == f.value(-t));  // |t| evaluation: exactly even
      const double v = f.value(t);
      CHECK(v < prev + 1e-12);
      prev = v;
      // residual of f f'' + p (f')^2 = -1, second derivative by central diff
      const double h = 1e-4;
      const double fpp = (f.value(t + h) + f.value(t - h) - 2 * f.value(t)) / (h * h);
      const double fp = f.derivative(t);
      CHECK(std::abs(f.value(t) * fpp + p * fp * fp + 1.0) <= 1e-5);
    }
    CHECK_THROWS_AS(f.value(1.1), std::domain_error);
  }
}

TEST_CASE("envelope scaling invariance") {
  const double lambda = 2.7;
  for (double p : {-0.5, 0.25, 1.0}) {
    const EnvelopeFunction f1(p, 1.0), f2(p, lambda);
    for (double t : {0.1, 0.4, 0.8})
      CHECK(f2.value(lambda * t) == doctest::Approx(lambda * f1.value(t)).epsilon(1e-8));
  }
}

TEST_CASE("closed form versus the ODE oracle") {
  for (double p : {-0.5, 0.0, 0.25, 1.0, 2.0}) {
    const EnvelopeFunction f(p, 1.0);
    const auto tab = envelope_ode_oracle(p, 1.0, 201);
    CHECK(std::abs(f.f0() - tab.f0) <= 1e-7);
    for (std::size_t i = 0; i < tab.t.size(); ++i) {
      if (tab.t[i] > 0.99) continue;
      CHECK(std::abs(f.value(tab.t[i]) - tab.f[i]) <= 1e-6);
    }
  }
  CHECK_THROWS_AS(envelope_ode_oracle(-1.0, 1.0, 100), std::domain_error);
}

TEST_CASE("odd p=0 closed form via Phi against its own oracle") {
  const EnvelopeFunction f(0.0, 1.0);
  const auto tab = envelope_ode_oracle(0.0, 1.0, 401);
  double worst = 0;
  for (std::size_t i = 0; i < tab.t.size(); ++i)
    if (tab.t[i] <= 0.99)
      worst = std::max(worst, std::abs(f.value(tab.t[i]) - tab.f[i]));
  CHECK(worst <= 1e-5);
}

TEST_CASE("phi special function") {
  CHECK(phi_special(1.0) == doctest::Approx(std::sqrt(kPi / 2)).epsilon(1e-13));
  CHECK(phi_special(0.0) == doctest::Approx(0.0));
  // oracle: complementary gaussian integral at x = e^{-1/2}
  CHECK(phi_special(std::exp(-0.5)) ==
        doctest::Approx(0.39768974542335145).epsilon(1e-11));
  // identity against direct quadrature of the raw singular integrand
  for (double x : {0.3, 0.7, 0.95}) {
    const double raw = adaptive_simpson(
        [](double s) { return 1.0 / std::sqrt(-2.0 * std::log(s)); }, 1e-300, x,
        1e-11, 1e-15);
    CHECK(phi_special(x) == doctest::Approx(raw).epsilon(1e-9));
  }
  CHECK_THROWS_AS(phi_special(1.2), std::domain_error);
  for (double s : {0.0, 0.3, 1.0, std::sqrt(kPi / 2)}) {
    CHECK(phi_special(phi_special_inverse(s)) == doctest::Approx(s).epsilon(1e-10));
  }
  CHECK_THROWS_AS(phi_special_inverse(2.0), std::domain_error);
}

TEST_CASE("g map is odd, increasing, infinite at the edge") {
  const double a = 1.0;
  CHECK(g_map(a, 0.0) == doctest::Approx(0.0));
  double prev = 0;
  for (double x = 0.05; x < a; x += 0.05) {
    const double g = g_map(a, x);
    CHECK(g > prev);
    CHECK(g_map(a, -x) == doctest::Approx(-g));
    prev = g;
  }
  CHECK(std::isinf(g_map(a, a)));
  CHECK_THROWS_AS(g_map(a, 1.5), std::domain_error);
  // integral form agrees with -f'
  const EnvelopeFunction f(0.0, a);
  for (double x : {0.2, 0.5, 0.8}) {
    const double integral = adaptive_simpson(
        [&](double s) { return 1.0 / f.value(s); }, 0.0, x, 1e-10, 1e-14);
    CHECK(g_map(a, x) == doctest::Approx(integral).epsilon(1e-6));
  }
}

TEST_CASE("caffarelli refinement bound") {
  CHECK(caffarelli_refinement_bound(1.0) == doctest::Approx(1.0));
  CHECK(caffarelli_refinement_bound(4.0) == doctest::Approx(0.5));
  CHECK(caffarelli_refinement_bound(0.25) == doctest::Approx(2.0));
  CHECK_THROWS_AS(caffarelli_refinement_bound(0.0), std::domain_error);
}

TEST_CASE("lipschitz constants of the uniform-target theorem") {
  // d=5, diam=1: sqrt(4)/(4 int sin) = 0.5
  CHECK(measure_set_bound(5, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
  // d=2, diam=sqrt(2): 4 sqrt(2)/(3 pi)
  CHECK(measure_set_bound(2, std::sqrt(2.0)) ==
        doctest::Approx(4 * std::sqrt(2.0) / (3 * kPi)).epsilon(1e-10));
  CHECK_THROWS_AS(measure_set_bound(1, 1.0), std::domain_error);
  // product variant: d=2, diam=1, p=-1/2 -> 1/2
  CHECK(measure_set_product_bound(2, 1.0, -0.5) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS(measure_set_product_bound(2, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(measure_set_product_bound(2, 1.0, -1.5), std::domain_error);
  // consistency with the envelope peak: bound = sqrt(d-1) f_{(d-1)/4, diam/2}(0) / ... via f0_from_a
  const double via_f0 = f0_from_a(std::sqrt(2.0), 0.25);
  CHECK(measure_set_bound(2, 2 * std::sqrt(2.0)) == doctest::Approx(via_f0).epsilon(1e-10));
}

TEST_CASE("transport tightness against the p=0 envelope") {
  // for the 1D gaussian -> uniform map the envelope is attained everywhere
  const auto g = measures::Potential::gaussian(1);
  const auto uni =
      measures::Potential::uniform_body(measures::ConvexBody::box({-1.0}, {1.0}));
  const auto T = transport1d::build_map_1d(g, uni);
  const EnvelopeFunction f(0.0, 1.0);
  double max_dd = -1, worst_gap = 0;
  for (int i = 0; i < 1001; ++i) {
    const double u = 1e-6 + (1 - 2e-6) * i / 1000.0;
    const double x = g.quantile1(u);
    const double dd = T.derivative(x);
    max_dd = std::max(max_dd, dd);
    worst_gap = std::max(worst_gap, std::abs(dd - f.value(T.map(x))));
  }
  CHECK(std::abs(max_dd - f.value(0.0)) <= 1e-4);
  CHECK(worst_gap <= 1e-6);
}

TEST_CASE("envelope csv") {
  const EnvelopeFunction f(0.25, 1.0);
  const auto csv = envelope_csv(f, 32);
  CHECK(csv.find("t,f,minus_df") == 0);
}
