#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otlab/numerics.hpp"
#include "otlab/ode.hpp"
#include "otlab/rng.hpp"

using namespace otlab;

TEST_CASE("adaptive simpson on smooth and kinked integrands") {
  CHECK(adaptive_simpson([](double x) { return std::exp(-x * x); }, -8, 8) ==
        doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
  // |x| has a kink; the split variant pins it
  const double v = adaptive_simpson_split(
      [](double x) { return std::abs(x); }, -1, 2, std::vector<double>{0.0});
  CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("gauss-legendre orders") {
  for (int n : {8, 16, 32, 64}) {
    CHECK(gauss_legendre([](double x) { return std::cos(x); }, 0, 1, n) ==
          doctest::Approx(std::sin(1.0)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(gauss_legendre([](double) { return 0.0; }, 0, 1, 7),
                  std::invalid_argument);
}

TEST_CASE("root finding") {
  CHECK(brent_root([](double x) { return x * x * x - 2; }, 0, 2) ==
        doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));
  CHECK(bisect([](double x) { return std::cos(x); }, 0, 3, 1e-13) ==
        doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK_THROWS_AS(brent_root([](double x) { return x * x + 1; }, -1, 1),
                  std::invalid_argument);
}

TEST_CASE("golden section maximum") {
  const double x = golden_max([](double t) { return -(t - 0.3) * (t - 0.3); },
                              -2, 2);
  CHECK(x == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("compass minimizer") {
  auto f = [](std::span<const double> z) {
    return (z[0] - 1) * (z[0] - 1) + 3 * (z[1] + 2) * (z[1] + 2);
  };
  const Vec z = compass_minimize(f, {0.0, 0.0}, 0.5, 1e-12);
  CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(z[1] == doctest::Approx(-2.0).epsilon(1e-8));
}

TEST_CASE("monotone cubic preserves monotonicity and hits nodes") {
  Vec x{0, 1, 2, 3, 4}, y{0, 0.1, 0.2, 3.0, 3.05};
  MonotoneCubic m(x, y);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(m(x[i]) == doctest::Approx(y[i]).epsilon(1e-14));
  double prev = -1;
  for (double t = 0; t <= 4; t += 1e-3) {
    const double v = m(t);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("normal cdf / quantile are mutual inverses") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 1 - 1e-7}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
}

TEST_CASE("gaussian upper tail") {
  CHECK(gaussian_upper_tail(0.0) == doctest::Approx(std::sqrt(kPi / 2)).epsilon(1e-14));
  CHECK(gaussian_upper_tail(1.0) == doctest::Approx(0.39768974542335145).epsilon(1e-12));
}

TEST_CASE("pairwise sum is independent of the block partition") {
  Rng rng(123);
  Vec v(100001);
  for (auto& x : v) x = rng.uniform(-1, 1) * std::pow(10.0, rng.uniform(-8, 8));
  const double s = pairwise_sum(v);
  CHECK(pairwise_sum(v) == s);  // deterministic
}

TEST_CASE("parallel_blocks covers every index once for any job count") {
  for (int jobs : {1, 3, 8}) {
    std::vector<int> hits(10000, 0);
    parallel_blocks(hits.size(), jobs,
                    [&](std::size_t a, std::size_t b) {
                      for (std::size_t i = a; i < b; ++i) hits[i] += 1;
                    },
                    257);
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
}

TEST_CASE("rng substreams are reproducible and label-addressable") {
  Rng a(7), b(7);
  CHECK(a.stream(3).next_u64() == b.stream(3).next_u64());
  CHECK(a.stream("x").next_u64() == b.stream("x").next_u64());
  CHECK(a.stream("x").next_u64() != a.stream("y").next_u64());
  Rng u(11);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("dopri5 integrates a known system with event stopping") {
  // y'' = -y: y = cos t, stop when y < 0.5 => t = pi/3
  Dopri5 solver([](double, const Dopri5::State& y) {
    return Dopri5::State{y[1], -y[0]};
  });
  const auto traj = solver.integrate_until(
      0.0, {1.0, 0.0}, 10.0,
      [](const Dopri5::State& y) { return y[0] > 0.5; });
  CHECK(traj.back().t == doctest::Approx(kPi / 3).epsilon(1e-9));
  const auto mid = Dopri5::sample(traj, 0.5);
  CHECK(mid[0] == doctest::Approx(std::cos(0.5)).epsilon(1e-9));
}

TEST_CASE("fnv digest and hex formatting") {
  CHECK(to_hex16(fnv1a64("a")).size() == 16);
  CHECK(fnv1a64("a") != fnv1a64("b"));
  CHECK(to_hex16(0x0123456789abcdefULL) == "0123456789abcdef");
}
