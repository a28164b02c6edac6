#include "otlab/transport1d.hpp"

#include <algorithm>
#include <cmath>

#include "otlab/rng.hpp"

namespace otlab::transport1d {

using measures::Density1D;

TransportMap1D::TransportMap1D(measures::Density1DPtr source,
                               measures::Density1DPtr target)
    : source_(std::move(source)), target_(std::move(target)) {
  if (!source_ || !target_)
    throw std::invalid_argument("TransportMap1D: null density");
  // target support must be a single interval with positive interior density
  if (target_->min_interior_density() <= 0)
    throw std::invalid_argument(
        "TransportMap1D: target density vanishes inside its support "
        "(disconnected support)");
}

double TransportMap1D::map(double x) const {
  const double u = source_->cdf(x);
  if (u <= 0) return target_->lo();
  if (u >= 1) return target_->hi();
  return target_->quantile_fast(u);
}

double TransportMap1D::inverse(double y) const {
  const double u = target_->cdf(y);
  if (u <= 0) return source_->lo();
  if (u >= 1) return source_->hi();
  return source_->quantile_fast(u);
}

double TransportMap1D::derivative(double x) const {
  const double y = map(x);
  const double rho_t = target_->density(y);
  if (rho_t <= 0 || y <= target_->lo() || y >= target_->hi())
    throw TargetBoundaryError(
        "map derivative at the target support boundary (zero density)");
  return source_->density(x) / rho_t;
}

double TransportMap1D::potential_second_quotient(double x, double t) const {
  if (t < 0) throw std::domain_error("potential_second_quotient: t >= 0");
  if (t == 0) return 0;
  auto f = [&](double s) { return map(x + s) - map(x - s); };
  return gauss_legendre(f, 0.0, t, 32);
}

std::pair<double, double> TransportMap1D::source_band(double u_eps) const {
  return {source_->quantile(u_eps), source_->quantile(1.0 - u_eps)};
}

TransportMap1D build_map_1d(const measures::Potential& source,
                            const measures::Potential& target, int resolution) {
  if (source.dimension() != 1 || target.dimension() != 1)
    throw std::invalid_argument("build_map_1d: both potentials must be 1D");
  (void)resolution;  // potentials carry tables at the default resolution
  auto src = std::make_shared<Density1D>(source.density1d());
  auto tgt = std::make_shared<Density1D>(target.density1d());
  return TransportMap1D(std::move(src), std::move(tgt));
}

Theorem1Constant theorem1_constant(double p, double q, double C_p, double C_q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 1.0))
    throw std::domain_error("theorem1_constant: need 0 <= p <= 1 <= q");
  if (!(C_p > 0.0 && C_q > 0.0))
    throw std::domain_error("theorem1_constant: constants must be positive");
  Theorem1Constant out;
  out.alpha = (p + 1.0) / (q + 1.0);
  out.constant = std::pow((q + 1.0) * C_p / ((p + 1.0) * C_q), 1.0 / (q + 1.0));
  return out;
}

HolderEstimate empirical_holder_1d(const TransportMap1D& T, double alpha,
                                   const PairSpec& spec, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("empirical_holder_1d: alpha in (0,1]");
  if (!(spec.t_max > spec.t_min && spec.t_min > 0) || spec.n_pairs < 1)
    throw std::invalid_argument("empirical_holder_1d: degenerate pair spec");
  const auto [band_lo, band_hi] = T.source_band(spec.u_band);

  auto ratio = [&](double x, double lt) {
    const double t = std::exp(lt);
    const double y = x + t;
    if (y > band_hi) return -1.0;
    return std::abs(T.map(y) - T.map(x)) / std::pow(t, alpha);
  };

  HolderEstimate best;
  best.value = -1;
  double x_lo = band_lo, x_hi = band_hi;
  double lt_lo = std::log(spec.t_min), lt_hi = std::log(spec.t_max);
  double bx = band_lo, blt = lt_lo;
  Rng rng = Rng(seed).stream("holder1d");
  int n = spec.n_pairs;
  for (int round = 0; round <= spec.refine_rounds; ++round) {
    for (int i = 0; i < n; ++i) {
      const double x = rng.uniform(x_lo, x_hi);
      const double lt = rng.uniform(lt_lo, lt_hi);
      const double v = ratio(x, lt);
      if (v > best.value) {
        best.value = v;
        bx = x;
        blt = lt;
      }
    }
    const double wx = (x_hi - x_lo) / spec.zoom;
    const double wt = (lt_hi - lt_lo) / spec.zoom;
    x_lo = std::max(band_lo, bx - 0.5 * wx);
    x_hi = std::min(band_hi, bx + 0.5 * wx);
    lt_lo = std::max(std::log(spec.t_min), blt - 0.5 * wt);
    lt_hi = std::min(std::log(spec.t_max), blt + 0.5 * wt);
    n = std::max(64, n / 2);
  }
  best.x = bx;
  best.y = bx + std::exp(blt);
  return best;
}

std::string map_csv(const TransportMap1D& T, int n) {
  std::string out = "x,T,dT\n";
  char buf[128];
  for (int i = 0; i < n; ++i) {
    const double u = 1e-6 + (1.0 - 2e-6) * i / (n - 1.0);
    const double x = T.source().quantile(u);
    double d = std::numeric_limits<double>::quiet_NaN();
    try {
      d = T.derivative(x);
    } catch (const TargetBoundaryError&) {
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, T.map(x), d);
    out += buf;
  }
  return out;
}

}  // namespace otlab::transport1d
