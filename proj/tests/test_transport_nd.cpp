#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otlab/rng.hpp"
#include "otlab/transport1d.hpp"
#include "otlab/transport_nd.hpp"

using namespace otlab;
using namespace otlab::measures;
using namespace otlab::transportnd;

namespace {

SolveParams small_params(double eps = 0.05) {
  SolveParams p;
  p.n = 500;
  p.m = 500;
  p.epsilon = eps;
  p.seed = 31;
  p.jobs = 1;
  return p;
}

}  // namespace

TEST_CASE("supporting slab") {
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  const auto [t0, a] = supporting_slab(box, Vec{1.0, 0.0});
  CHECK(t0 == doctest::Approx(0.0));
  CHECK(a == doctest::Approx(1.0));

  const auto ball = ConvexBody::ball({0.3, -0.2}, 0.7);
  const Vec h{0.0, 1.0};
  const auto [bt0, ba] = supporting_slab(ball, h);
  CHECK(bt0 == doctest::Approx(-0.2));
  CHECK(ba == doctest::Approx(0.7));

  const auto rect = ConvexBody::box({0.0, 0.0}, {2.0, 1.0});
  const double s = 1.0 / std::sqrt(2.0);
  const auto [rt0, ra] = supporting_slab(rect, Vec{s, s});
  CHECK(rt0 == doctest::Approx(3.0 / (2 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(ra == doctest::Approx(3.0 / (2 * std::sqrt(2.0))).epsilon(1e-12));

  CHECK_THROWS_AS(supporting_slab(box, Vec{2.0, 0.0}), std::invalid_argument);
}

TEST_CASE("entropic solve reaches marginal feasibility and dual optimality") {
  const auto g2 = Potential::gaussian(2);
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  const auto tp = solve_entropic(g2, box, small_params());
  CHECK(tp.converged());
  CHECK(tp.marginal_error() < 1e-6);
  CHECK(tp.dual_update_norm() < 1e-8);
  CHECK(tp.plan_marginal_error() == tp.marginal_error());
}

TEST_CASE("map stays in the body and is centered by symmetry") {
  const auto g2 = Potential::gaussian(2);
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  const auto tp = solve_entropic(g2, box, small_params());
  const double blur = 3 * std::sqrt(tp.epsilon());
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec y = tp.map(x);
    CHECK(box.contains(y, blur));  // convex hull of targets is inside the body
  }
  const Vec t0 = tp.map(Vec{0.0, 0.0});
  CHECK(std::abs(t0[0]) < blur);
  CHECK(std::abs(t0[1]) < blur);
  // far field: the first coordinate approaches the box face
  const Vec tf = tp.map(Vec{4.0, 0.0});
  CHECK(std::abs(tf[0] - 1.0) < std::sqrt(tp.epsilon()) + 0.05);
}

TEST_CASE("self transport is close to the identity") {
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  const auto uniform = Potential::uniform_body(box);
  const auto tp = solve_entropic(uniform, box, small_params());
  const double tol = 3 * std::sqrt(tp.epsilon());
  Rng rng(9);
  double mean_disp = 0;
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    const Vec x{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
    const Vec y = tp.map(x);
    mean_disp += std::hypot(y[0] - x[0], y[1] - x[1]);
  }
  CHECK(mean_disp / n < tol);
  // potential second quotient of |x|^2/2 is about t^2
  const Vec h{1.0, 0.0};
  const double t = 0.6;
  const double q = tp.potential_second_quotient(Vec{0.1, -0.2}, h, t);
  CHECK(std::abs(q - t * t) / (t * t) <
        10 * std::sqrt(tp.epsilon()) / t);
}

TEST_CASE("monotonicity proxy on sampled pairs") {
  const auto g2 = Potential::gaussian(2);
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  const auto tp = solve_entropic(g2, box, small_params());
  Rng rng(21);
  for (int i = 0; i < 10000; ++i) {
    const Vec x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec y{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec tx = tp.map(x), ty = tp.map(y);
    const double inner = (tx[0] - ty[0]) * (x[0] - y[0]) +
                         (tx[1] - ty[1]) * (x[1] - y[1]);
    CHECK(inner >= -5 * tp.epsilon());
  }
}

TEST_CASE("second quotient requires a scale above the smoothing") {
  const auto g2 = Potential::gaussian(2);
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  const auto tp = solve_entropic(g2, box, small_params());
  CHECK_THROWS_AS(
      tp.potential_second_quotient(Vec{0.0, 0.0}, Vec{1.0, 0.0},
                                   std::sqrt(tp.epsilon())),
      std::domain_error);
  const double q =
      tp.potential_second_quotient(Vec{0.0, 0.0}, Vec{1.0, 0.0}, 0.5);
  CHECK(q >= -5 * tp.epsilon());
}

TEST_CASE("entropic second quotient matches the exact product transport") {
  // product source and box target factorize: the potential is a sum of 1D ones
  const auto g2 = Potential::gaussian(2);
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  SolveParams prm;
  prm.n = 1500;
  prm.m = 1500;
  prm.epsilon = 0.03;
  prm.seed = 4;
  const auto tp = solve_entropic(g2, box, prm);
  const auto g1 = Potential::gaussian(1);
  const auto u1 = Potential::uniform_body(ConvexBody::box({-1.0}, {1.0}));
  const auto T1 = transport1d::build_map_1d(g1, u1);
  const Vec h{1.0, 0.0};
  for (double t : {0.4, 0.8}) {
    const double entropic = tp.potential_second_quotient(Vec{0.0, 0.0}, h, t);
    const double exact = T1.potential_second_quotient(0.0, t);
    CHECK(std::abs(entropic - exact) < 8 * prm.epsilon);
  }
}

TEST_CASE("cost homogeneity: scaling the geometry scales the quotient") {
  const auto g2 = Potential::gaussian(2);
  const auto s = g2.sample(300, 77);
  std::vector<Vec> src = s.points, tgt;
  Rng rng(78);
  for (int i = 0; i < 300; ++i)
    tgt.push_back(Vec{rng.uniform(-1, 1), rng.uniform(-1, 1)});
  SolveParams p1;
  p1.n = 300;
  p1.m = 300;
  p1.epsilon = 0.05;
  const auto tp1 = solve_entropic_points(src, tgt, p1);

  const double lam = 2.0;
  std::vector<Vec> src2 = src, tgt2 = tgt;
  for (auto& v : src2)
    for (auto& c : v) c *= lam;
  for (auto& v : tgt2)
    for (auto& c : v) c *= lam;
  SolveParams p2 = p1;
  p2.epsilon = p1.epsilon * lam * lam;
  const auto tp2 = solve_entropic_points(src2, tgt2, p2);

  const Vec x{0.2, -0.1}, x2{0.4, -0.2}, h{1.0, 0.0};
  const double q1 = tp1.potential_second_quotient(x, h, 0.5);
  const double q2 = tp2.potential_second_quotient(x2, h, 1.0);
  CHECK(q2 == doctest::Approx(lam * lam * q1).epsilon(1e-9));
}

TEST_CASE("halving epsilon moves the lipschitz estimate by less than 10%") {
  const auto g2 = Potential::gaussian(2);
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  SolveParams a = small_params(0.06);
  a.n = a.m = 800;
  SolveParams b = a;
  b.epsilon = 0.03;
  const auto ta = solve_entropic(g2, box, a);
  const auto tb = solve_entropic(g2, box, b);
  const auto ea = empirical_lipschitz_nd(ta, 2000, 5, g2);
  const auto eb = empirical_lipschitz_nd(tb, 2000, 5, g2);
  CHECK(std::abs(ea.value - eb.value) / ea.value < 0.10);
}

TEST_CASE("deterministic across worker counts") {
  const auto g2 = Potential::gaussian(2);
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  SolveParams p1 = small_params();
  SolveParams p8 = small_params();
  p8.jobs = 8;
  const auto t1 = solve_entropic(g2, box, p1);
  const auto t8 = solve_entropic(g2, box, p8);
  REQUIRE(t1.dual_f().size() == t8.dual_f().size());
  for (std::size_t i = 0; i < t1.dual_f().size(); i += 37)
    CHECK(t1.dual_f()[i] == t8.dual_f()[i]);  // bit-identical
  CHECK(t1.marginal_error() == t8.marginal_error());
}

TEST_CASE("plan entries and potentials export") {
  const auto g2 = Potential::gaussian(2);
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  SolveParams p = small_params();
  p.n = p.m = 120;
  const auto tp = solve_entropic(g2, box, p);
  const auto entries = tp.plan_entries(1e-6);
  CHECK(entries.size() > 100);
  double mass = 0;
  for (const auto& [i, j, w] : entries) mass += w;
  CHECK(mass > 0.5);
  CHECK(tp.potentials_csv().find("side,index") == 0);
}

TEST_CASE("input validation") {
  const auto g2 = Potential::gaussian(2);
  const auto g3 = Potential::gaussian(3);
  const auto box = ConvexBody::box({-1.0, -1.0}, {1.0, 1.0});
  CHECK_THROWS_AS(solve_entropic(g3, box, small_params()), std::invalid_argument);
  SolveParams bad = small_params();
  bad.epsilon = -1;
  SolveParams tiny = small_params();
  tiny.n = 1;
  CHECK_THROWS_AS(solve_entropic(g2, box, tiny), std::invalid_argument);
  const auto tp = solve_entropic(g2, box, small_params());
  CHECK_THROWS_AS(empirical_holder_nd(tp, 1.5, 10, 1, g2), std::domain_error);
  CHECK_THROWS_AS(empirical_holder_nd(tp, 1.0, 0, 1, g2), std::invalid_argument);
}
