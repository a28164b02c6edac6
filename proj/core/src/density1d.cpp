#include "otlab/density1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otlab::measures {

namespace {
constexpr double kTailU = 1e-7;  // quantile table covers [kTailU, 1-kTailU]
}

Density1D::Density1D(std::function<double(double)> log_rho, double lo, double hi,
                     Vec breakpoints, int table_size)
    : log_rho_(std::move(log_rho)), lo_(lo), hi_(hi), breaks_(std::move(breakpoints)) {
  if (!(hi_ > lo_)) throw std::invalid_argument("Density1D: empty support");
  if (table_size < 64) table_size = 64;

  auto rho = [this](double x) { return std::exp(log_rho_(x)); };

  // normalizer, split at kinks and at the mode (log_rho concave for our families)
  Vec split = breaks_;
  const double mode = golden_max([this](double x) { return log_rho_(x); }, lo_, hi_,
                                 1e-9 * (hi_ - lo_));
  split.push_back(mode);
  total_ = adaptive_simpson_split(rho, lo_, hi_, split, 1e-12, 1e-300);
  if (!(total_ > 0) || !std::isfinite(total_))
    throw std::runtime_error("Density1D: non-integrable density");
  log_norm_ = std::log(total_);

  // coarse uniform grid -> coarse CDF -> mass-equidistributed final grid
  const int coarse_n = 2048;
  Vec cx(coarse_n + 1), ccum(coarse_n + 1, 0.0);
  for (int i = 0; i <= coarse_n; ++i)
    cx[i] = lo_ + (hi_ - lo_) * i / coarse_n;
  for (double b : breaks_) {
    // snap the nearest coarse node onto each kink
    const auto it = std::lower_bound(cx.begin(), cx.end(), b);
    if (it != cx.begin() && it != cx.end()) *it = b;
  }
  for (int i = 0; i < coarse_n; ++i)
    ccum[i + 1] = ccum[i] + adaptive_simpson(rho, cx[i], cx[i + 1], 1e-9, 1e-300, 30);
  const double coarse_total = ccum.back();

  Vec nodes;
  nodes.reserve(table_size + 16);
  nodes.push_back(lo_);
  {
    std::size_t j = 0;
    for (int k = 1; k < table_size; ++k) {
      const double target = coarse_total * k / table_size;
      while (j + 1 < ccum.size() && ccum[j + 1] < target) ++j;
      const double m0 = ccum[j], m1 = ccum[j + 1];
      const double w = (m1 > m0) ? (target - m0) / (m1 - m0) : 0.5;
      nodes.push_back(cx[j] + w * (cx[j + 1] - cx[j]));
    }
  }
  nodes.push_back(hi_);
  for (double b : breaks_)
    if (b > lo_ && b < hi_) nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [&](double a, double b) {
                            return std::abs(a - b) < 1e-13 * (hi_ - lo_);
                          }),
              nodes.end());

  grid_ = std::move(nodes);
  cum_.assign(grid_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
    cum_[i + 1] = cum_[i] + gauss_legendre(rho, grid_[i], grid_[i + 1], 16);
  // rescale so cdf(hi)=1 exactly despite independent per-cell quadrature
  total_ = cum_.back();
  log_norm_ = std::log(total_);

  // Bulk quantile table against the probit transform z = Phi^{-1}(u): x(z) is
  // exactly linear for Gaussian laws and nearly flat for every log-concave
  // family, so a modest monotone-cubic table reaches ~1e-12 interior accuracy.
  {
    const double z_max = -normal_quantile(kTailU);
    const int nz = 2048;
    Vec zz, xx, slopes;
    zz.reserve(nz + 1);
    xx.reserve(nz + 1);
    bool slopes_ok = true;
    for (int i = 0; i <= nz; ++i) {
      const double z = -z_max + 2.0 * z_max * i / nz;
      const double x = quantile(normal_cdf(z));
      if (!xx.empty() && !(x > xx.back())) continue;  // flat-tail duplicates
      zz.push_back(z);
      xx.push_back(x);
      // dx/dz = phi(z)/rho(x); exact slopes push the table to ~1e-12
      const double rho = density(x);
      const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
      if (rho > 0 && std::isfinite(phi / rho)) {
        slopes.push_back(phi / rho);
      } else {
        slopes_ok = false;
      }
    }
    if (zz.size() >= 2) {
      if (slopes_ok && slopes.size() == zz.size())
        quantile_table_ = MonotoneCubic(std::move(zz), std::move(xx), std::move(slopes));
      else
        quantile_table_ = MonotoneCubic(std::move(zz), std::move(xx));
    }
  }

  min_density_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < grid_.size(); ++i)
    min_density_ = std::min(min_density_, density(grid_[i]));
}

double Density1D::density(double x) const {
  if (x < lo_ || x > hi_) return 0.0;
  return std::exp(log_rho_(x) - log_norm_);
}

double Density1D::log_density(double x) const {
  if (x < lo_ || x > hi_) return -std::numeric_limits<double>::infinity();
  return log_rho_(x) - log_norm_;
}

double Density1D::raw_mass(double a, double b) const {
  auto rho = [this](double x) { return std::exp(log_rho_(x)); };
  return adaptive_simpson(rho, a, b, 1e-12, 1e-300, 40);
}

double Density1D::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double residual = raw_mass(grid_[i], x);
  return std::min(1.0, (cum_[i] + residual) / total_);
}

double Density1D::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("Density1D::quantile: u must be in (0,1)");
  const double target = u * total_;
  // bracket by table cell
  std::size_t lo = 0, hi = grid_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (cum_[mid] <= target ? lo : hi) = mid;
  }
  double a = grid_[lo], b = grid_[hi];
  double x = 0.5 * (a + b);
  // bracketed Newton on cdf(x)-u
  for (int it = 0; it < 100; ++it) {
    const double f = cdf(x) - u;
    if (std::abs(f) < 1e-15) break;
    if (f > 0)
      b = x;
    else
      a = x;
    const double d = density(x);
    double xn = (d > 0) ? x - f / d : 0.5 * (a + b);
    if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
    if (std::abs(xn - x) < 1e-15 * std::max(1.0, std::abs(x))) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

double Density1D::quantile_fast(double u) const {
  if (quantile_table_.empty()) return quantile(u);
  if (u < kTailU || u > 1.0 - kTailU) return quantile(std::clamp(u, 1e-12, 1.0 - 1e-12));
  return quantile_table_(normal_quantile(u));
}

double Density1D::mean() const {
  auto f = [this](double x) { return x * density(x); };
  return adaptive_simpson_split(f, lo_, hi_, breaks_, 1e-11, 1e-300);
}

double Density1D::variance() const {
  const double m = mean();
  auto f = [this, m](double x) { return (x - m) * (x - m) * density(x); };
  return adaptive_simpson_split(f, lo_, hi_, breaks_, 1e-11, 1e-300);
}

}  // namespace otlab::measures
