#include "otlab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "otlab/rng.hpp"
#include "otlab/transport1d.hpp"

namespace otlab::concentration {

BaseSet BaseSet::half_space(Vec n, double c) {
  BaseSet s;
  s.kind = Kind::HalfSpace;
  s.normal = std::move(n);
  s.offset = c;
  return s;
}

BaseSet BaseSet::ball(Vec c, double r) {
  if (!(r > 0)) throw std::invalid_argument("BaseSet::ball: radius > 0");
  BaseSet s;
  s.kind = Kind::Ball;
  s.center = std::move(c);
  s.radius = r;
  return s;
}

double BaseSet::distance(std::span<const double> x, Norm norm) const {
  if (kind == Kind::HalfSpace) {
    const double excess = dot(normal, x) - offset;
    if (excess <= 0) return 0.0;
    return excess / measures::dual_norm_of(normal, norm);
  }
  Vec d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - center[i];
  return std::max(0.0, measures::norm_of(d, norm) - radius);
}

Estimate enlargement_probability(const Potential& pot, const EnlargementQuery& q,
                                 int jobs) {
  if (q.r < 0) throw std::domain_error("enlargement_probability: r >= 0");
  const std::size_t n = q.sample_count;
  constexpr std::size_t kBlock = 65536;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<std::uint64_t> hits(nblocks, 0);
  const Rng root(q.seed);
  const int ud = pot.uniform_dim();
  parallel_blocks(
      n, jobs,
      [&](std::size_t i0, std::size_t i1) {
        Rng rng = root.stream(i0 / kBlock);
        Vec u(ud);
        std::uint64_t h = 0;
        for (std::size_t i = i0; i < i1; ++i) {
          for (int k = 0; k < ud; ++k) u[k] = rng.uniform();
          const Vec x = pot.from_uniform(u);
          if (q.set.distance(x, q.norm) <= q.r) ++h;
        }
        hits[i0 / kBlock] = h;
      },
      kBlock);
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(n);
  Estimate e;
  e.value = p;
  const double z = 1.959963984540054;
  if (p * (1 - p) * static_cast<double>(n) >= 5.0) {
    e.ci_halfwidth = z * std::sqrt(p * (1 - p) / static_cast<double>(n));
  } else {
    // Wilson interval near 0/1
    const double nn = static_cast<double>(n);
    const double denom = 1.0 + z * z / nn;
    const double center = (p + z * z / (2 * nn)) / denom;
    const double half =
        z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
    e.ci_halfwidth = half + std::abs(center - p);
  }
  return e;
}

double ms_profile_bound(double nuA, double r, const ConvexityModulus& delta) {
  if (!(nuA > 0 && nuA < 1))
    throw std::domain_error("ms_profile_bound: nu(A) in (0,1) required");
  if (r < 0) throw std::domain_error("ms_profile_bound: r >= 0");
  if (r == 0) return nuA;
  if (r / 8.0 > delta.grid.back())
    throw std::domain_error(
        "ms_profile_bound: delta undefined at r/8 (outside grid, no "
        "extrapolation here)");
  const double d = delta.eval(r / 8.0);
  return normal_cdf(normal_quantile(nuA) + 0.5 * std::sqrt(std::max(0.0, d)));
}

double ms_exp_bound(bool nuA_ge_half, double r, const ConvexityModulus& delta) {
  if (!nuA_ge_half)
    throw std::domain_error("ms_exp_bound: requires nu(A) >= 1/2");
  if (r < 0) throw std::domain_error("ms_exp_bound: r >= 0");
  if (r == 0) return 0.5;
  if (r / 8.0 > delta.grid.back())
    throw std::domain_error("ms_exp_bound: delta undefined at r/8");
  const double d = delta.eval(r / 8.0);
  return 1.0 - 0.5 * std::exp(-d / 8.0);
}

ModulusFn as_fn(const ConvexityModulus& m) {
  return [m](double t) { return m.eval(t); };
}

ModulusFn conjugate_fn(ModulusFn b, double s_max) {
  return [b = std::move(b), s_max](double t) {
    if (t <= 0) return 0.0;
    auto obj = [&](double s) { return t * s - b(s); };
    const double s_star = golden_max(obj, 0.0, s_max, 1e-12 * s_max);
    return std::max(0.0, obj(s_star));
  };
}

PerturbedDensity1D::PerturbedDensity1D(const Density1D& nu,
                                       std::function<double(double)> g,
                                       std::function<double(double)> dg)
    : g_(std::move(g)), dg_(std::move(dg)) {
  auto integrand = [&](double x) { return std::exp(g_(x)) * nu.density(x); };
  const double z = adaptive_simpson(integrand, nu.lo(), nu.hi(), 1e-12, 1e-300);
  if (!(z > 0) || !std::isfinite(z))
    throw std::runtime_error("PerturbedDensity1D: perturbation not integrable");
  log_z_ = std::log(z);
}

double PerturbedDensity1D::f(double x) const { return std::exp(g_(x) - log_z_); }

double PerturbedDensity1D::log_f(double x) const { return g_(x) - log_z_; }

VerificationReport talagrand_check(const Density1D& nu,
                                   const PerturbedDensity1D& f, Norm norm,
                                   const ModulusFn& b, double abs_tol,
                                   std::string_view check_id,
                                   std::string_view config_digest) {
  (void)norm;  // scalar norms coincide in 1D
  if (nu.min_interior_density() <= 0)
    throw std::invalid_argument("talagrand_check: zero-density region splits the support");
  // exact transport nu -> f nu via quantile composition
  auto target = std::make_shared<Density1D>(
      [&nu, &f](double x) { return nu.log_density(x) + f.log_f(x); }, nu.lo(),
      nu.hi());
  const transport1d::TransportMap1D T(
      std::make_shared<Density1D>(nu), target);

  auto lhs_integrand = [&](double x) {
    return b(std::abs(T.map(x) - x)) * nu.density(x);
  };
  const double lhs = adaptive_simpson(lhs_integrand, nu.lo(), nu.hi(), 1e-9, 1e-13);
  auto rhs_integrand = [&](double x) {
    const double fx = f.f(x);
    return fx * f.log_f(x) * nu.density(x);
  };
  const double rhs = adaptive_simpson(rhs_integrand, nu.lo(), nu.hi(), 1e-11, 1e-14);

  VerificationReport r;
  r.check_id = std::string(check_id);
  r.anchor = "transport-entropy-inequality";
  r.theoretical = rhs;
  r.empirical = lhs;
  r.slack = 1.0;
  r.abs_tol = abs_tol;
  r.config_digest = std::string(config_digest);
  verify::finalize(r);
  return r;
}

VerificationReport mlsi_check(const Density1D& nu, const PerturbedDensity1D& f,
                              Norm norm, const ModulusFn& b_conj, double abs_tol,
                              std::string_view check_id,
                              std::string_view config_digest) {
  (void)norm;
  auto lhs_integrand = [&](double x) {
    return f.f(x) * f.log_f(x) * nu.density(x);
  };
  const double lhs = adaptive_simpson(lhs_integrand, nu.lo(), nu.hi(), 1e-11, 1e-14);
  auto rhs_integrand = [&](double x) {
    return b_conj(std::abs(f.grad_over_f(x))) * f.f(x) * nu.density(x);
  };
  const double rhs = adaptive_simpson(rhs_integrand, nu.lo(), nu.hi(), 1e-9, 1e-13);

  VerificationReport r;
  r.check_id = std::string(check_id);
  r.anchor = "modified-log-sobolev";
  r.theoretical = rhs;
  r.empirical = lhs;
  r.slack = 1.0;
  r.abs_tol = abs_tol;
  r.config_digest = std::string(config_digest);
  verify::finalize(r);
  return r;
}

namespace {

VerificationReport marton_one(double nuA, double nuArc, double ci, double r,
                              double bt, std::string_view check_id,
                              std::string_view anchor,
                              std::string_view config_digest) {
  VerificationReport rep;
  rep.check_id = std::string(check_id);
  rep.anchor = std::string(anchor);
  rep.empirical = std::exp(2.0 * bt);
  rep.slack = 1.0;
  rep.abs_tol = 1e-9;
  rep.config_digest = std::string(config_digest);
  rep.witness.t = r;
  if (nuArc <= ci) {
    // complement mass statistically indistinguishable from zero
    rep.vacuous = true;
    rep.passed = true;
    rep.theoretical = std::numeric_limits<double>::infinity();
    rep.notes = "nu(A_r^c) CI includes 0; bound trivially true";
    return rep;
  }
  rep.theoretical = 1.0 / ((nuA + ci) * (nuArc + ci));
  verify::finalize(rep);
  return rep;
}

}  // namespace

MartonResult marton_check_values(double nuA, double nuArc, double ci, double r,
                                 const ModulusFn& b_tilde,
                                 std::string_view check_id,
                                 std::string_view config_digest) {
  if (!(nuA >= 0.5 - ci))
    throw std::domain_error("marton_check: requires nu(A) >= 1/2");
  MartonResult out;
  out.chain = marton_one(nuA, nuArc, ci, r, b_tilde(r / 2.0),
                         std::string(check_id) + ":chain",
                         "marton-enlargement:chain-r/2", config_digest);
  out.displayed = marton_one(nuA, nuArc, ci, r, b_tilde(r),
                             std::string(check_id) + ":displayed",
                             "marton-enlargement:displayed-r", config_digest);
  return out;
}

MartonResult marton_check(const Potential& nu, const BaseSet& A, double r,
                          Norm norm, const ModulusFn& b_tilde,
                          std::size_t sample_count, std::uint64_t seed, int jobs,
                          std::string_view check_id,
                          std::string_view config_digest) {
  EnlargementQuery qa{A, 0.0, norm, sample_count, seed};
  const Estimate ea = enlargement_probability(nu, qa, jobs);
  EnlargementQuery qr{A, r, norm, sample_count, seed};
  const Estimate er = enlargement_probability(nu, qr, jobs);
  auto res = marton_check_values(ea.value, 1.0 - er.value,
                                 ea.ci_halfwidth + er.ci_halfwidth, r, b_tilde,
                                 check_id, config_digest);
  res.chain.seed = seed;
  res.displayed.seed = seed;
  return res;
}

double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf) {
  Vec s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double F = cdf(s[i]);
    d = std::max(d, std::abs(F - (i + 1) / n));
    d = std::max(d, std::abs(F - i / n));
  }
  return d;
}

std::string profile_csv(std::span<const ProfilePoint> pts) {
  std::string out = "r,empirical,profile_bound,exp_bound,ci\n";
  char buf[160];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.r,
                  p.empirical, p.profile_bound, p.exp_bound, p.ci);
    out += buf;
  }
  return out;
}

}  // namespace otlab::concentration
