#include "otlab/transport_nd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "otlab/rng.hpp"

namespace otlab::transportnd {

using measures::ConvexBody;
using measures::Potential;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// branch-light exp for the Sinkhorn inner loops; ~1e-14 relative error,
// auto-vectorizes (the shifted arguments are always <= 0 here)
inline double fast_exp(double x) {
  x = x < -700.0 ? -700.0 : x;
  const double kd = std::nearbyint(x * 1.4426950408889634074);
  const double r = (x - kd * 6.93147180369123816490e-01) -
                   kd * 1.90821492927058770002e-10;
  double p = 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const auto ki = static_cast<long long>(kd);
  double two_k;
  const unsigned long long bits =
      static_cast<unsigned long long>(ki + 1023) << 52;
  __builtin_memcpy(&two_k, &bits, sizeof two_k);
  return p * two_k;
}

double halton(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

std::vector<Vec> stratified_body_points(const ConvexBody& body, int m) {
  static const int bases[3] = {2, 3, 5};
  const int d = body.dimension();
  const auto [lo, hi] = body.bounding_box();
  std::vector<Vec> pts;
  pts.reserve(m);
  Vec x(d);
  std::uint64_t i = 1;
  std::uint64_t tried = 0;
  while (static_cast<int>(pts.size()) < m) {
    for (int k = 0; k < d; ++k)
      x[k] = lo[k] + (hi[k] - lo[k]) * halton(i, bases[k]);
    ++i;
    if (body.contains(x)) pts.push_back(x);
    if (++tried > 100000ull * static_cast<std::uint64_t>(m) + 100000ull)
      throw std::runtime_error("stratified_body_points: acceptance too low");
  }
  return pts;
}

}  // namespace

EntropicTransport solve_entropic_points(std::vector<Vec> source,
                                        std::vector<Vec> target,
                                        const SolveParams& params) {
  const int n = static_cast<int>(source.size());
  const int m = static_cast<int>(target.size());
  if (n < 2 || m < 2) throw std::invalid_argument("solve_entropic: need n,m >= 2");
  const int d = static_cast<int>(source[0].size());
  if (!(params.epsilon > 0)) throw std::invalid_argument("solve_entropic: eps > 0");

  EntropicTransport tp;
  tp.dim_ = d;
  tp.epsilon_ = params.epsilon;
  tp.jobs_ = params.jobs;
  tp.source_ = std::move(source);
  tp.target_ = std::move(target);
  tp.f_.assign(n, 0.0);
  tp.g_.assign(m, 0.0);
  tp.flat_target_.resize(static_cast<std::size_t>(m) * d);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < d; ++k) tp.flat_target_[j * d + k] = tp.target_[j][k];

  // cost matrix, row-major n x m, plus the transpose for the column update
  std::vector<double> cost(static_cast<std::size_t>(n) * m);
  std::vector<double> cost_t(static_cast<std::size_t>(n) * m);
  double mean_cost = 0;
  for (int i = 0; i < n; ++i) {
    const Vec& xi = tp.source_[i];
    for (int j = 0; j < m; ++j) {
      double s = 0;
      for (int k = 0; k < d; ++k) {
        const double dd = xi[k] - tp.flat_target_[j * d + k];
        s += dd * dd;
      }
      const double c = 0.5 * s;
      cost[static_cast<std::size_t>(i) * m + j] = c;
      cost_t[static_cast<std::size_t>(j) * n + i] = c;
      mean_cost += c;
    }
  }
  mean_cost /= static_cast<double>(n) * m;

  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(m));

  // Scaled-domain iterations on the absorbed kernel K = exp((f+g-c)/eps):
  // matvecs in the hot loop, log-stabilized by folding the scalings u, v back
  // into the duals whenever they drift.
  std::vector<double> K(static_cast<std::size_t>(n) * m);
  std::vector<double> Kt(static_cast<std::size_t>(n) * m);
  Vec u(n, 1.0), v(m, 1.0), Kv(n), Ktu(m);

  auto rebuild = [&](double eps) {
    const double inv_eps = 1.0 / eps;
    for (int i = 0; i < n; ++i) tp.f_[i] += eps * std::log(u[i]);
    for (int j = 0; j < m; ++j) tp.g_[j] += eps * std::log(v[j]);
    std::fill(u.begin(), u.end(), 1.0);
    std::fill(v.begin(), v.end(), 1.0);
    parallel_blocks(n, params.jobs, [&](std::size_t i0, std::size_t i1) {
      for (std::size_t i = i0; i < i1; ++i) {
        const double* ci = cost.data() + i * m;
        double* ki = K.data() + i * m;
        const double fi = tp.f_[i];
#pragma omp simd
        for (int j = 0; j < m; ++j)
          ki[j] = fast_exp((fi + tp.g_[j] - ci[j]) * inv_eps) / m;
      }
    }, 64);
    parallel_blocks(m, params.jobs, [&](std::size_t j0, std::size_t j1) {
      for (std::size_t j = j0; j < j1; ++j) {
        const double* cj = cost_t.data() + j * n;
        double* kj = Kt.data() + j * n;
        const double gj = tp.g_[j];
#pragma omp simd
        for (int i = 0; i < n; ++i)
          kj[i] = fast_exp((tp.f_[i] + gj - cj[i]) * inv_eps) / n;
      }
    }, 64);
  };
  auto matvec_rows = [&]() {  // Kv_i = sum_j K_ij v_j
    parallel_blocks(n, params.jobs, [&](std::size_t i0, std::size_t i1) {
      for (std::size_t i = i0; i < i1; ++i) {
        const double* ki = K.data() + i * m;
        double s = 0;
#pragma omp simd reduction(+ : s)
        for (int j = 0; j < m; ++j) s += ki[j] * v[j];
        Kv[i] = s;
      }
    }, 64);
  };
  auto matvec_cols = [&]() {  // Ktu_j = sum_i K_ij u_i
    parallel_blocks(m, params.jobs, [&](std::size_t j0, std::size_t j1) {
      for (std::size_t j = j0; j < j1; ++j) {
        const double* kj = Kt.data() + j * n;
        double s = 0;
#pragma omp simd reduction(+ : s)
        for (int i = 0; i < n; ++i) s += kj[i] * u[i];
        Ktu[j] = s;
      }
    }, 64);
  };
  auto marginal_error = [&]() {
    matvec_rows();
    matvec_cols();
    Vec err_r(n), err_c(m);
    for (int i = 0; i < n; ++i) err_r[i] = std::abs(u[i] * Kv[i] - 1.0) / n;
    for (int j = 0; j < m; ++j) err_c[j] = std::abs(v[j] * Ktu[j] - 1.0) / m;
    return pairwise_sum(err_r) + pairwise_sum(err_c);
  };

  // epsilon scaling from a coarse temperature down to the target
  std::vector<double> schedule;
  double e = std::max(params.epsilon, 0.25 * mean_cost);
  while (e > params.epsilon * 1.5) {
    schedule.push_back(e);
    e *= 0.5;
  }
  schedule.push_back(params.epsilon);

  int total_iter = 0;
  tp.converged_ = false;
  for (std::size_t lvl = 0; lvl < schedule.size(); ++lvl) {
    const double eps = schedule[lvl];
    const bool final_lvl = (lvl + 1 == schedule.size());
    const int lvl_iters = final_lvl ? params.max_iter : 10;
    rebuild(eps);
    for (int it = 0; it < lvl_iters && total_iter < params.max_iter; ++it) {
      matvec_rows();
      double du = 0;
      bool underflow = false;
      for (int i = 0; i < n; ++i) {
        if (Kv[i] <= 0) {
          underflow = true;
          break;
        }
        const double un = 1.0 / Kv[i];
        du = std::max(du, std::abs(std::log(un / u[i])));
        u[i] = un;
      }
      matvec_cols();
      double dv = 0;
      for (int j = 0; j < m; ++j) {
        if (Ktu[j] <= 0) {
          underflow = true;
          break;
        }
        const double vn = 1.0 / Ktu[j];
        dv = std::max(dv, std::abs(std::log(vn / v[j])));
        v[j] = vn;
      }
      ++total_iter;
      if (underflow) {
        rebuild(eps);
        continue;
      }
      tp.dual_update_norm_ = eps * std::max(du, dv);
      double drift = 0;
      for (int i = 0; i < n; ++i) drift = std::max(drift, std::abs(std::log(u[i])));
      for (int j = 0; j < m; ++j) drift = std::max(drift, std::abs(std::log(v[j])));
      if (drift > 25.0) rebuild(eps);
      if (final_lvl && tp.dual_update_norm_ < params.dual_tol) {
        tp.marginal_error_ = marginal_error();
        if (tp.marginal_error_ < params.tol) {
          tp.converged_ = true;
          break;
        }
      }
    }
  }
  // fold the remaining scalings into the duals
  for (int i = 0; i < n; ++i) tp.f_[i] += params.epsilon * std::log(u[i]);
  for (int j = 0; j < m; ++j) tp.g_[j] += params.epsilon * std::log(v[j]);
  tp.iterations_ = total_iter;
  if (!tp.converged_) {
    std::fill(u.begin(), u.end(), 1.0);
    std::fill(v.begin(), v.end(), 1.0);
    rebuild(params.epsilon);
    tp.marginal_error_ = marginal_error();
  }
  return tp;
}

EntropicTransport solve_entropic(const Potential& source, const ConvexBody& body,
                                 const SolveParams& params) {
  if (source.dimension() != body.dimension())
    throw std::invalid_argument("solve_entropic: dimension mismatch");
  if (source.dimension() < 2 || source.dimension() > 3)
    throw std::invalid_argument("solve_entropic: d must be 2 or 3");
  SolveParams p = params;
  if (p.epsilon <= 0) {
    const double diam = body.diameter();
    p.epsilon = 5e-3 * diam * diam;
  }
  auto src = source.sample(p.n, Rng(p.seed).stream("entropic-source").root());
  auto tgt = stratified_body_points(body, p.m);
  return solve_entropic_points(std::move(src.points), std::move(tgt), p);
}

EntropicTransport solve_entropic_to_measure(const Potential& source,
                                            const Potential& target,
                                            const SolveParams& params) {
  if (source.dimension() != target.dimension())
    throw std::invalid_argument("solve_entropic_to_measure: dimension mismatch");
  SolveParams p = params;
  if (p.epsilon <= 0) p.epsilon = 5e-3 * 16.0;
  auto src = source.sample(p.n, Rng(p.seed).stream("entropic-source").root());
  auto tgt = target.sample(p.m, Rng(p.seed).stream("entropic-target").root());
  return solve_entropic_points(std::move(src.points), std::move(tgt.points), p);
}

Vec EntropicTransport::map(std::span<const double> x) const {
  const int m = static_cast<int>(target_.size());
  double mx = kNegInf;
  Vec logits(m);
  for (int j = 0; j < m; ++j) {
    double s = 0;
    for (int k = 0; k < dim_; ++k) {
      const double dd = x[k] - flat_target_[j * dim_ + k];
      s += dd * dd;
    }
    logits[j] = (g_[j] - 0.5 * s) / epsilon_;
    mx = std::max(mx, logits[j]);
  }
  Vec out(dim_, 0.0);
  double z = 0;
  for (int j = 0; j < m; ++j) {
    const double w = std::exp(logits[j] - mx);
    z += w;
    for (int k = 0; k < dim_; ++k) out[k] += w * flat_target_[j * dim_ + k];
  }
  for (int k = 0; k < dim_; ++k) out[k] /= z;
  return out;
}

double EntropicTransport::potential(std::span<const double> x) const {
  const int m = static_cast<int>(target_.size());
  double mx = kNegInf;
  Vec logits(m);
  for (int j = 0; j < m; ++j) {
    double s = 0;
    for (int k = 0; k < dim_; ++k) {
      const double dd = x[k] - flat_target_[j * dim_ + k];
      s += dd * dd;
    }
    logits[j] = (g_[j] - 0.5 * s) / epsilon_;
    mx = std::max(mx, logits[j]);
  }
  double z = 0;
  for (int j = 0; j < m; ++j) z += std::exp(logits[j] - mx);
  const double log_b = -std::log(static_cast<double>(m));
  return 0.5 * dot(x, x) + epsilon_ * (mx + std::log(z) + log_b);
}

double EntropicTransport::potential_second_quotient(std::span<const double> x,
                                                    std::span<const double> h,
                                                    double t) const {
  if (!(t > 2.0 * std::sqrt(epsilon_)))
    throw std::domain_error(
        "potential_second_quotient: t too small relative to the entropic "
        "smoothing scale (need t > 2 sqrt(eps))");
  Vec xp(dim_), xm(dim_);
  for (int k = 0; k < dim_; ++k) {
    xp[k] = x[k] + t * h[k];
    xm[k] = x[k] - t * h[k];
  }
  return potential(xp) + potential(xm) - 2.0 * potential(x);
}

double EntropicTransport::directional_derivative(std::span<const double> x,
                                                 std::span<const double> h) const {
  const Vec tx = map(x);
  return dot(tx, h);
}

double EntropicTransport::plan_marginal_error() const { return marginal_error_; }

std::vector<std::tuple<int, int, double>> EntropicTransport::plan_entries(
    double threshold) const {
  const int n = static_cast<int>(source_.size());
  const int m = static_cast<int>(target_.size());
  std::vector<std::tuple<int, int, double>> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double s = 0;
      for (int k = 0; k < dim_; ++k) {
        const double dd = source_[i][k] - flat_target_[j * dim_ + k];
        s += dd * dd;
      }
      const double pij = std::exp((f_[i] + g_[j] - 0.5 * s) / epsilon_) /
                         (static_cast<double>(n) * m);
      if (pij > threshold) out.emplace_back(i, j, pij);
    }
  }
  return out;
}

std::string EntropicTransport::potentials_csv() const {
  std::string out = "side,index,x1,x2,x3,dual\n";
  char buf[192];
  for (std::size_t i = 0; i < source_.size(); ++i) {
    const Vec& p = source_[i];
    std::snprintf(buf, sizeof buf, "source,%zu,%.17g,%.17g,%.17g,%.17g\n", i,
                  p[0], dim_ > 1 ? p[1] : 0.0, dim_ > 2 ? p[2] : 0.0, f_[i]);
    out += buf;
  }
  for (std::size_t j = 0; j < target_.size(); ++j) {
    const Vec& p = target_[j];
    std::snprintf(buf, sizeof buf, "target,%zu,%.17g,%.17g,%.17g,%.17g\n", j,
                  p[0], dim_ > 1 ? p[1] : 0.0, dim_ > 2 ? p[2] : 0.0, g_[j]);
    out += buf;
  }
  return out;
}

std::pair<double, double> supporting_slab(const ConvexBody& body,
                                          std::span<const double> h) {
  const double nh = norm2(h);
  if (std::abs(nh - 1.0) > 1e-9)
    throw std::invalid_argument("supporting_slab: h must be a unit vector");
  const auto [lo, hi] = body.support_interval(h);
  return {0.5 * (lo + hi), 0.5 * (hi - lo)};
}

NdHolderEstimate empirical_holder_nd(const EntropicTransport& tp, double alpha,
                                     int pair_count, std::uint64_t seed,
                                     const Potential& source, double min_sep) {
  if (!(alpha > 0 && alpha <= 1))
    throw std::domain_error("empirical_holder_nd: alpha in (0,1]");
  if (pair_count < 1)
    throw std::invalid_argument("empirical_holder_nd: degenerate pair spec");
  if (min_sep < 0) min_sep = 4.0 * std::sqrt(tp.epsilon());

  const auto pts =
      source.sample(2 * static_cast<std::size_t>(pair_count),
                    Rng(seed).stream("nd-pairs").root());
  NdHolderEstimate best;
  best.value = -1;
  auto consider = [&](const Vec& x, const Vec& y) {
    Vec diff(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) diff[k] = x[k] - y[k];
    const double sep = norm2(diff);
    if (sep < min_sep) return;
    const Vec tx = tp.map(x), ty = tp.map(y);
    Vec td(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) td[k] = tx[k] - ty[k];
    const double v = norm2(td) / std::pow(sep, alpha);
    if (v > best.value) {
      best.value = v;
      best.x = x;
      best.y = y;
    }
  };
  for (int i = 0; i < pair_count; ++i) consider(pts.points[2 * i], pts.points[2 * i + 1]);
  // local refinement: jitter the incumbent pair with shrinking radius
  Rng jit = Rng(seed).stream("nd-pairs-refine");
  double radius = 0.5;
  for (int round = 0; round < 3; ++round) {
    const Vec cx = best.x, cy = best.y;
    for (int i = 0; i < 200; ++i) {
      Vec x = cx, y = cy;
      for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] += radius * (2.0 * jit.uniform() - 1.0);
        y[k] += radius * (2.0 * jit.uniform() - 1.0);
      }
      consider(x, y);
    }
    radius /= 8.0;
  }
  return best;
}

NdHolderEstimate empirical_lipschitz_nd(const EntropicTransport& tp,
                                        int pair_count, std::uint64_t seed,
                                        const Potential& source, double min_sep) {
  return empirical_holder_nd(tp, 1.0, pair_count, seed, source, min_sep);
}

}  // namespace otlab::transportnd
