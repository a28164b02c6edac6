#include "otlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otlab/rng.hpp"

namespace otlab::measures {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ------------------------------------------------------------------- norms

double norm_of(std::span<const double> v, Norm n) {
  switch (n) {
    case Norm::L2:
      return norm2(v);
    case Norm::L1: {
      double s = 0;
      for (double x : v) s += std::abs(x);
      return s;
    }
    case Norm::Linf: {
      double s = 0;
      for (double x : v) s = std::max(s, std::abs(x));
      return s;
    }
  }
  return 0;
}

double dual_norm_of(std::span<const double> v, Norm n) {
  switch (n) {
    case Norm::L2:
      return norm_of(v, Norm::L2);
    case Norm::L1:
      return norm_of(v, Norm::Linf);
    case Norm::Linf:
      return norm_of(v, Norm::L1);
  }
  return 0;
}

std::string norm_name(Norm n) {
  switch (n) {
    case Norm::L2: return "L2";
    case Norm::L1: return "L1";
    case Norm::Linf: return "Linf";
  }
  return "?";
}

// -------------------------------------------------------------- ConvexBody

ConvexBody ConvexBody::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("ConvexBody::box: mismatched bounds");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(hi[i] > lo[i])) throw std::invalid_argument("ConvexBody::box: empty interior");
  ConvexBody b;
  b.shape_ = Shape::Box;
  b.dim_ = static_cast<int>(lo.size());
  b.lo_ = std::move(lo);
  b.hi_ = std::move(hi);
  // vertex cache (2^d corners)
  const int d = b.dim_;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1 ? b.hi_[i] : b.lo_[i];
    b.vertices_.push_back(std::move(v));
  }
  return b;
}

ConvexBody ConvexBody::ball(Vec center, double radius) {
  if (center.empty() || !(radius > 0))
    throw std::invalid_argument("ConvexBody::ball: need positive radius");
  ConvexBody b;
  b.shape_ = Shape::Ball;
  b.dim_ = static_cast<int>(center.size());
  b.center_ = std::move(center);
  b.radius_ = radius;
  return b;
}

namespace {

// Solve the dxd system A x = rhs by Gaussian elimination; false if singular.
bool solve_small(std::vector<Vec> A, Vec rhs, Vec& out) {
  const std::size_t d = rhs.size();
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (std::abs(A[piv][col]) < 1e-12) return false;
    std::swap(A[piv], A[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < d; ++c) A[r][c] -= f * A[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  out.resize(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = rhs[i] / A[i][i];
  return true;
}

}  // namespace

ConvexBody ConvexBody::polytope(std::vector<Vec> normals, Vec offsets, int dim) {
  if (normals.size() != offsets.size() || normals.size() < static_cast<std::size_t>(dim + 1))
    throw std::invalid_argument("ConvexBody::polytope: need at least dim+1 halfspaces");
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("ConvexBody::polytope: dimension must be 1..3");
  ConvexBody b;
  b.shape_ = Shape::Polytope;
  b.dim_ = dim;
  b.normals_ = std::move(normals);
  b.offsets_ = std::move(offsets);

  // vertex enumeration over all d-subsets of hyperplanes
  const std::size_t k = b.normals_.size();
  auto feasible = [&](const Vec& x) {
    for (std::size_t i = 0; i < k; ++i)
      if (dot(b.normals_[i], x) > b.offsets_[i] + 1e-9) return false;
    return true;
  };
  std::vector<std::size_t> idx(dim);
  std::function<void(std::size_t, int)> rec = [&](std::size_t start, int depth) {
    if (depth == dim) {
      std::vector<Vec> A;
      Vec rhs;
      for (int j = 0; j < dim; ++j) {
        A.push_back(b.normals_[idx[j]]);
        rhs.push_back(b.offsets_[idx[j]]);
      }
      Vec v;
      if (solve_small(A, rhs, v) && feasible(v)) {
        for (const Vec& w : b.vertices_) {
          double dist = 0;
          for (int i = 0; i < dim; ++i) dist += std::abs(w[i] - v[i]);
          if (dist < 1e-9) return;
        }
        b.vertices_.push_back(v);
      }
      return;
    }
    for (std::size_t i = start; i < k; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  if (b.vertices_.size() < static_cast<std::size_t>(dim + 1))
    throw std::invalid_argument("ConvexBody::polytope: degenerate or empty body");
  // boundedness: every direction must be blocked by some halfspace
  const int probes = (dim == 1) ? 2 : (dim == 2 ? 256 : 1024);
  Rng rng(0x9d2c5680);
  for (int p = 0; p < probes; ++p) {
    Vec u(dim);
    double nn = 0;
    for (int i = 0; i < dim; ++i) {
      u[i] = rng.normal();
      nn += u[i] * u[i];
    }
    if (nn == 0) continue;
    bool blocked = false;
    for (std::size_t i = 0; i < k && !blocked; ++i)
      if (dot(b.normals_[i], u) > 1e-9 * std::sqrt(nn)) blocked = true;
    if (!blocked)
      throw std::invalid_argument("ConvexBody::polytope: unbounded halfspace system");
  }
  return b;
}

bool ConvexBody::contains(std::span<const double> x, double tol) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("ConvexBody::contains: dimension mismatch");
  switch (shape_) {
    case Shape::Box:
      for (int i = 0; i < dim_; ++i)
        if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
      return true;
    case Shape::Ball: {
      double s = 0;
      for (int i = 0; i < dim_; ++i) s += (x[i] - center_[i]) * (x[i] - center_[i]);
      return std::sqrt(s) <= radius_ + tol;
    }
    case Shape::Polytope:
      for (std::size_t i = 0; i < normals_.size(); ++i)
        if (dot(normals_[i], x) > offsets_[i] + tol) return false;
      return true;
  }
  return false;
}

std::pair<Vec, Vec> ConvexBody::bounding_box() const {
  switch (shape_) {
    case Shape::Box:
      return {lo_, hi_};
    case Shape::Ball: {
      Vec lo(center_), hi(center_);
      for (int i = 0; i < dim_; ++i) {
        lo[i] -= radius_;
        hi[i] += radius_;
      }
      return {lo, hi};
    }
    case Shape::Polytope: {
      Vec lo(dim_, kInf), hi(dim_, -kInf);
      for (const Vec& v : vertices_)
        for (int i = 0; i < dim_; ++i) {
          lo[i] = std::min(lo[i], v[i]);
          hi[i] = std::max(hi[i], v[i]);
        }
      return {lo, hi};
    }
  }
  return {};
}

double ConvexBody::diameter() const {
  switch (shape_) {
    case Shape::Ball:
      return 2.0 * radius_;
    case Shape::Box: {
      double s = 0;
      for (int i = 0; i < dim_; ++i) s += (hi_[i] - lo_[i]) * (hi_[i] - lo_[i]);
      return std::sqrt(s);
    }
    case Shape::Polytope: {
      double best = 0;
      for (std::size_t i = 0; i < vertices_.size(); ++i)
        for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
          double s = 0;
          for (int k = 0; k < dim_; ++k) {
            const double d = vertices_[i][k] - vertices_[j][k];
            s += d * d;
          }
          best = std::max(best, s);
        }
      return std::sqrt(best);
    }
  }
  return 0;
}

double ConvexBody::volume() const {
  switch (shape_) {
    case Shape::Box: {
      double v = 1;
      for (int i = 0; i < dim_; ++i) v *= hi_[i] - lo_[i];
      return v;
    }
    case Shape::Ball:
      if (dim_ == 1) return 2 * radius_;
      if (dim_ == 2) return kPi * radius_ * radius_;
      return 4.0 / 3.0 * kPi * radius_ * radius_ * radius_;
    case Shape::Polytope: {
      if (dim_ == 1) {
        auto [lo, hi] = bounding_box();
        return hi[0] - lo[0];
      }
      // centroid fan over faces; vertices of each face sorted in-plane
      Vec c(dim_, 0.0);
      for (const Vec& v : vertices_)
        for (int i = 0; i < dim_; ++i) c[i] += v[i] / vertices_.size();
      if (dim_ == 2) {
        // angular sort around centroid, shoelace
        std::vector<Vec> vs = vertices_;
        std::sort(vs.begin(), vs.end(), [&](const Vec& a, const Vec& b) {
          return std::atan2(a[1] - c[1], a[0] - c[0]) <
                 std::atan2(b[1] - c[1], b[0] - c[0]);
        });
        double area = 0;
        for (std::size_t i = 0; i < vs.size(); ++i) {
          const Vec& a = vs[i];
          const Vec& b = vs[(i + 1) % vs.size()];
          area += a[0] * b[1] - b[0] * a[1];
        }
        return 0.5 * std::abs(area);
      }
      // d = 3: cone volume over each face polygon
      double vol = 0;
      for (std::size_t f = 0; f < normals_.size(); ++f) {
        std::vector<Vec> face;
        for (const Vec& v : vertices_)
          if (std::abs(dot(normals_[f], v) - offsets_[f]) < 1e-7) face.push_back(v);
        if (face.size() < 3) continue;
        // orthonormal in-plane axes for the angular sort
        Vec n = normals_[f];
        const double nn = norm2(n);
        for (double& x : n) x /= nn;
        Vec a{1, 0, 0};
        if (std::abs(n[0]) > 0.9) a = {0, 1, 0};
        Vec e1(3), e2(3);
        // e1 = normalize(a - (a.n)n), e2 = n x e1
        const double an = dot(a, n);
        for (int i = 0; i < 3; ++i) e1[i] = a[i] - an * n[i];
        const double e1n = norm2(e1);
        for (double& x : e1) x /= e1n;
        e2 = {n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2],
              n[0] * e1[1] - n[1] * e1[0]};
        Vec fc(3, 0.0);
        for (const Vec& v : face)
          for (int i = 0; i < 3; ++i) fc[i] += v[i] / face.size();
        std::sort(face.begin(), face.end(), [&](const Vec& u, const Vec& v) {
          Vec du(3), dv(3);
          for (int i = 0; i < 3; ++i) {
            du[i] = u[i] - fc[i];
            dv[i] = v[i] - fc[i];
          }
          return std::atan2(dot(du, e2), dot(du, e1)) <
                 std::atan2(dot(dv, e2), dot(dv, e1));
        });
        for (std::size_t i = 0; i < face.size(); ++i) {
          const Vec& p = face[i];
          const Vec& q = face[(i + 1) % face.size()];
          // tetra (c, fc, p, q)
          Vec u(3), v(3), w(3);
          for (int k = 0; k < 3; ++k) {
            u[k] = fc[k] - c[k];
            v[k] = p[k] - c[k];
            w[k] = q[k] - c[k];
          }
          const double det = u[0] * (v[1] * w[2] - v[2] * w[1]) -
                             u[1] * (v[0] * w[2] - v[2] * w[0]) +
                             u[2] * (v[0] * w[1] - v[1] * w[0]);
          vol += std::abs(det) / 6.0;
        }
      }
      return vol;
    }
  }
  return 0;
}

std::pair<double, double> ConvexBody::support_interval(std::span<const double> h) const {
  if (static_cast<int>(h.size()) != dim_)
    throw std::invalid_argument("support_interval: dimension mismatch");
  switch (shape_) {
    case Shape::Box: {
      double lo = 0, hi = 0;
      for (int i = 0; i < dim_; ++i) {
        lo += std::min(h[i] * lo_[i], h[i] * hi_[i]);
        hi += std::max(h[i] * lo_[i], h[i] * hi_[i]);
      }
      return {lo, hi};
    }
    case Shape::Ball: {
      const double c = dot(center_, h);
      const double r = radius_ * norm2(h);
      return {c - r, c + r};
    }
    case Shape::Polytope: {
      double lo = kInf, hi = -kInf;
      for (const Vec& v : vertices_) {
        const double s = dot(v, h);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      return {lo, hi};
    }
  }
  return {0, 0};
}

// --------------------------------------------------------------- Potential

namespace {

double huber1(double x) {
  const double a = std::abs(x);
  return a <= 1.0 ? 0.5 * x * x : a - 0.5;
}

double huber1_deriv(double x) { return std::clamp(x, -1.0, 1.0); }

double surface_area(int d) {
  if (d == 1) return 2.0;
  if (d == 2) return 2.0 * kPi;
  return 4.0 * kPi;
}

}  // namespace

Potential Potential::gaussian(int d, double sigma) {
  if (d < 1 || d > 3) throw std::invalid_argument("Potential::gaussian: d must be 1..3");
  if (!(sigma > 0)) throw std::invalid_argument("Potential::gaussian: sigma > 0");
  Potential p;
  p.family_ = Family::Gaussian;
  p.dim_ = d;
  p.sigma_ = sigma;
  p.log_norm_ = d * std::log(sigma * std::sqrt(2.0 * kPi));
  if (d == 1) {
    const double s2 = 2.0 * sigma * sigma;
    p.density1d_ = std::make_shared<Density1D>(
        [s2](double x) { return -x * x / s2; }, -10.0 * sigma, 10.0 * sigma);
  }
  return p;
}

Potential Potential::power_law(int d, double beta) {
  if (d < 1 || d > 3) throw std::invalid_argument("Potential::power_law: d must be 1..3");
  if (!(beta >= 1.0)) throw std::invalid_argument("Potential::power_law: beta >= 1");
  Potential p;
  p.family_ = Family::PowerLaw;
  p.dim_ = d;
  p.beta_ = beta;
  const double rmax = 1.3 * std::pow(50.0, 1.0 / beta) + 1.0;
  if (d == 1) {
    Vec breaks;
    if (beta != 2.0 && beta != 4.0) breaks.push_back(0.0);  // |x|^beta kink
    p.density1d_ = std::make_shared<Density1D>(
        [beta](double x) { return -std::pow(std::abs(x), beta); }, -rmax, rmax,
        breaks);
    p.log_norm_ = p.density1d_->log_normalizer();
  } else {
    p.radial_ = std::make_shared<Density1D>(
        [beta, d](double r) {
          return (d - 1) * std::log(std::max(r, 1e-300)) - std::pow(r, beta);
        },
        0.0, rmax);
    // Z = S_{d-1} * int r^{d-1} e^{-r^beta} dr
    p.log_norm_ = std::log(surface_area(d)) + p.radial_->log_normalizer();
  }
  return p;
}

Potential Potential::huber_product(int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("Potential::huber_product: d must be 1..3");
  Potential p;
  p.family_ = Family::Huber1DProduct;
  p.dim_ = d;
  p.density1d_ = std::make_shared<Density1D>(
      [](double x) { return -huber1(x); }, -55.0, 55.0, Vec{-1.0, 1.0});
  p.log_norm_ = d * p.density1d_->log_normalizer();
  return p;
}

Potential Potential::uniform_body(ConvexBody body) {
  Potential p;
  p.family_ = Family::UniformBody;
  p.dim_ = body.dimension();
  p.log_norm_ = std::log(body.volume());
  if (p.dim_ == 1) {
    auto [lo, hi] = body.bounding_box();
    p.density1d_ = std::make_shared<Density1D>([](double) { return 0.0; }, lo[0], hi[0]);
  }
  p.body_ = std::move(body);
  return p;
}

double Potential::value(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("Potential::value: dimension mismatch");
  switch (family_) {
    case Family::Gaussian:
      return dot(x, x) / (2.0 * sigma_ * sigma_) + log_norm_;
    case Family::PowerLaw:
      return std::pow(norm2(x), beta_) + log_norm_;
    case Family::Huber1DProduct: {
      double s = 0;
      for (double xi : x) s += huber1(xi);
      return s + log_norm_;
    }
    case Family::UniformBody:
      return body_->contains(x) ? log_norm_ : kInf;
  }
  return 0;
}

void Potential::gradient(std::span<const double> x, std::span<double> out) const {
  if (static_cast<int>(x.size()) != dim_ || out.size() != x.size())
    throw std::invalid_argument("Potential::gradient: dimension mismatch");
  switch (family_) {
    case Family::Gaussian:
      for (int i = 0; i < dim_; ++i) out[i] = x[i] / (sigma_ * sigma_);
      return;
    case Family::PowerLaw: {
      const double r = norm2(x);
      if (r == 0) {
        for (int i = 0; i < dim_; ++i) out[i] = 0;
        return;
      }
      const double f = beta_ * std::pow(r, beta_ - 2.0);
      for (int i = 0; i < dim_; ++i) out[i] = f * x[i];
      return;
    }
    case Family::Huber1DProduct:
      for (int i = 0; i < dim_; ++i) out[i] = huber1_deriv(x[i]);
      return;
    case Family::UniformBody:
      for (int i = 0; i < dim_; ++i) out[i] = 0;
      return;
  }
}

double Potential::second_quotient(std::span<const double> x,
                                  std::span<const double> y) const {
  if (x.size() != y.size() || static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("Potential::second_quotient: dimension mismatch");
  if (family_ == Family::Gaussian) return dot(y, y) / (sigma_ * sigma_);
  Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] += y[i];
    xm[i] -= y[i];
  }
  return value(xp) + value(xm) - 2.0 * value(x);
}

double Potential::cdf1(double x) const {
  if (dim_ != 1) throw std::invalid_argument("cdf1: requires d=1");
  switch (family_) {
    case Family::Gaussian:
      return normal_cdf(x / sigma_);
    case Family::UniformBody: {
      const double lo = density1d_->lo(), hi = density1d_->hi();
      return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
    }
    default:
      return density1d_->cdf(x);
  }
}

double Potential::quantile1(double u) const {
  if (dim_ != 1) throw std::invalid_argument("quantile1: requires d=1");
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile1: u must be in (0,1)");
  switch (family_) {
    case Family::Gaussian:
      return sigma_ * normal_quantile(u);
    case Family::UniformBody: {
      const double lo = density1d_->lo(), hi = density1d_->hi();
      return lo + u * (hi - lo);
    }
    default:
      return density1d_->quantile(u);
  }
}

const Density1D& Potential::density1d() const {
  if (dim_ != 1 || !density1d_)
    throw std::invalid_argument("density1d: requires d=1");
  return *density1d_;
}

int Potential::uniform_dim() const { return dim_; }

Vec Potential::from_uniform(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != uniform_dim())
    throw std::invalid_argument("from_uniform: wrong number of uniforms");
  Vec x(dim_);
  switch (family_) {
    case Family::Gaussian:
      for (int i = 0; i < dim_; ++i)
        x[i] = sigma_ * normal_quantile(std::clamp(u[i], 1e-16, 1.0 - 1e-16));
      return x;
    case Family::Huber1DProduct:
      for (int i = 0; i < dim_; ++i)
        x[i] = density1d_->quantile_fast(std::clamp(u[i], 1e-16, 1.0 - 1e-16));
      return x;
    case Family::PowerLaw: {
      if (dim_ == 1) {
        x[0] = density1d_->quantile_fast(std::clamp(u[0], 1e-16, 1.0 - 1e-16));
        return x;
      }
      const double r = radial_->quantile_fast(std::clamp(u[0], 1e-16, 1.0 - 1e-16));
      if (dim_ == 2) {
        const double th = 2.0 * kPi * u[1];
        x = {r * std::cos(th), r * std::sin(th)};
      } else {
        const double z = 2.0 * u[1] - 1.0;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double ph = 2.0 * kPi * u[2];
        x = {r * rho * std::cos(ph), r * rho * std::sin(ph), r * z};
      }
      return x;
    }
    case Family::UniformBody:
      throw std::invalid_argument("from_uniform: not defined for UniformBody");
  }
  return x;
}

SampleResult Potential::sample(std::size_t n, std::uint64_t seed, int jobs) const {
  if (n < 1) throw std::invalid_argument("sample: n >= 1");
  SampleResult out;
  out.points.resize(n);
  const Rng root(seed);
  constexpr std::size_t kBlock = 4096;

  if (family_ != Family::UniformBody) {
    const int ud = uniform_dim();
    parallel_blocks(
        n, jobs,
        [&](std::size_t i0, std::size_t i1) {
          Rng rng = root.stream(i0 / kBlock);
          Vec u(ud);
          for (std::size_t i = i0; i < i1; ++i) {
            for (int k = 0; k < ud; ++k) u[k] = rng.uniform();
            out.points[i] = from_uniform(u);
          }
        },
        kBlock);
    out.acceptance_ratio = 1.0;
    return out;
  }

  // rejection from the bounding box
  const auto [lo, hi] = body_->bounding_box();
  std::vector<std::uint64_t> draws((n + kBlock - 1) / kBlock, 0);
  parallel_blocks(
      n, jobs,
      [&](std::size_t i0, std::size_t i1) {
        Rng rng = root.stream(i0 / kBlock);
        std::uint64_t local = 0;
        Vec x(dim_);
        for (std::size_t i = i0; i < i1; ++i) {
          for (;;) {
            ++local;
            for (int k = 0; k < dim_; ++k) x[k] = rng.uniform(lo[k], hi[k]);
            if (body_->contains(x)) break;
            if (local > 20000ull * (i1 - i0))
              throw std::runtime_error(
                  "sample: rejection acceptance below 1e-4 (body too thin)");
          }
          out.points[i] = x;
        }
        draws[i0 / kBlock] = local;
      },
      kBlock);
  std::uint64_t total = 0;
  for (auto d : draws) total += d;
  out.acceptance_ratio = static_cast<double>(n) / static_cast<double>(total);
  if (out.acceptance_ratio < 1e-4)
    throw std::runtime_error("sample: rejection acceptance below 1e-4 (body too thin)");
  return out;
}

std::optional<double> Potential::analytic_delta(double t) const {
  if (family_ == Family::Gaussian) return t * t / (sigma_ * sigma_);
  return std::nullopt;
}

std::optional<double> Potential::analytic_bregman(double t) const {
  if (family_ == Family::Gaussian) return 0.5 * t * t / (sigma_ * sigma_);
  return std::nullopt;
}

ConvexFunction Potential::as_convex_function() const {
  ConvexFunction f;
  f.dim = dim_;
  f.value = [p = *this](std::span<const double> x) { return p.value(x); };
  f.gradient = [p = *this](std::span<const double> x, std::span<double> g) {
    p.gradient(x, g);
  };
  return f;
}

C1Function1D Potential::as_c1_1d() const {
  if (dim_ != 1) throw std::invalid_argument("as_c1_1d: requires d=1");
  C1Function1D f;
  f.value = [p = *this](double x) { return p.value(std::span<const double>(&x, 1)); };
  f.derivative = [p = *this](double x) {
    double g;
    p.gradient(std::span<const double>(&x, 1), std::span<double>(&g, 1));
    return g;
  };
  return f;
}

// -------------------------------------------------------- ConvexityModulus

std::string modulus_kind_name(ModulusKind k) {
  switch (k) {
    case ModulusKind::Delta: return "delta";
    case ModulusKind::Bregman: return "bregman";
    case ModulusKind::BregmanConvexified: return "bregman_convexified";
    case ModulusKind::BregmanConjugate: return "bregman_conjugate";
  }
  return "?";
}

void ConvexityModulus::validate() const {
  if (grid.size() != values.size() || grid.size() < 2)
    throw std::invalid_argument("ConvexityModulus: need matching grid/values");
  if (grid[0] != 0.0 || values[0] != 0.0)
    throw std::invalid_argument("ConvexityModulus: grid must start at t=0 with value 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("ConvexityModulus: grid not strictly increasing");
    if (values[i] < values[i - 1] - 1e-12)
      throw std::invalid_argument("ConvexityModulus: values not nondecreasing");
  }
}

double ConvexityModulus::eval(double t) const {
  if (t < grid.front() || t > grid.back())
    throw std::domain_error("ConvexityModulus::eval: t outside tabulated grid");
  MonotoneCubic interp(grid, values);
  return interp(t);
}

Extrapolated ConvexityModulus::inverse(double v) const {
  if (v < 0) throw std::domain_error("ConvexityModulus::inverse: negative value");
  if (v == 0) return {0.0, false};
  MonotoneCubic interp(grid, values);
  if (v <= values.back()) {
    // locate the strictly increasing region covering v
    std::size_t i = 1;
    while (i < values.size() && values[i] < v) ++i;
    if (i >= values.size() || !(values[i] > values[i - 1]))
      throw std::domain_error("ConvexityModulus::inverse: not invertible at value");
    const double t = brent_root([&](double x) { return interp(x) - v; },
                                grid[i - 1], grid[i], 1e-14);
    return {t, false};
  }
  // dominant-power fit over the last decade of the grid
  const double t_hi = grid.back();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] >= 0.1 * t_hi && values[i] > 0) {
      const double lx = std::log(grid[i]), ly = std::log(values[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
    }
  }
  if (cnt < 2)
    throw std::domain_error("ConvexityModulus::inverse: cannot extrapolate");
  const double alpha = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double logC = (sy - alpha * sx) / cnt;
  return {std::exp((std::log(v) - logC) / alpha), true};
}

SearchSpec default_search(int dim) {
  SearchSpec s;
  s.box_lo.assign(dim, -10.0);
  s.box_hi.assign(dim, 10.0);
  s.grid_per_axis = (dim <= 2) ? 64 : 12;
  s.directions = 64;
  return s;
}

namespace {

std::vector<Vec> direction_set(int dim, int count, Norm norm) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
  } else if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * kPi * k / count;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          if (a == 0 && b == 0 && c == 0) continue;
          dirs.push_back({double(a), double(b), double(c)});
        }
  }
  for (Vec& d : dirs) {
    const double nn = norm_of(d, norm);
    for (double& x : d) x /= nn;
  }
  return dirs;
}

Vec angles_to_unit(std::span<const double> ang, int dim, Norm norm) {
  Vec u(dim);
  if (dim == 1) {
    u[0] = ang[0] >= 0 ? 1.0 : -1.0;
  } else if (dim == 2) {
    u = {std::cos(ang[0]), std::sin(ang[0])};
  } else {
    const double ct = std::cos(ang[0]), st = std::sin(ang[0]);
    u = {st * std::cos(ang[1]), st * std::sin(ang[1]), ct};
  }
  const double nn = norm_of(u, norm);
  for (double& x : u) x /= nn;
  return u;
}

double unit_to_angle(const Vec& u) { return std::atan2(u[1], u[0]); }

enum class Objective { Delta, Bregman, SecondDiffSup };

double eval_objective(const ConvexFunction& W, Objective which,
                      std::span<const double> x, std::span<const double> u,
                      double t) {
  const int d = W.dim;
  Vec xp(d), xm(d);
  for (int i = 0; i < d; ++i) {
    xp[i] = x[i] + t * u[i];
    xm[i] = x[i] - t * u[i];
  }
  switch (which) {
    case Objective::Delta:
      return W.value(xp) + W.value(xm) - 2.0 * W.value(x);
    case Objective::SecondDiffSup:
      return -(W.value(xp) + W.value(xm) - 2.0 * W.value(x));
    case Objective::Bregman: {
      Vec g(d);
      W.gradient(x, g);
      double lin = 0;
      for (int i = 0; i < d; ++i) lin += g[i] * u[i];
      return W.value(xp) - W.value(x) - t * lin;
    }
  }
  return 0;
}

double modulus_search(const ConvexFunction& W, Objective which, double t,
                      Norm norm, const SearchSpec& spec) {
  const int dim = W.dim;
  if (spec.box_lo.size() != static_cast<std::size_t>(dim) ||
      spec.box_hi.size() != static_cast<std::size_t>(dim) ||
      spec.grid_per_axis < 2 || spec.directions < 1)
    throw std::invalid_argument("modulus search: empty or invalid search spec");
  if (t < 0) throw std::domain_error("modulus search: t >= 0 required");
  if (t == 0) return 0.0;

  const auto dirs = direction_set(dim, spec.directions, norm);
  double best = kInf;
  Vec best_x(dim, 0.0);
  std::size_t best_dir = 0;

  Vec lo = spec.box_lo, hi = spec.box_hi;
  for (int round = 0; round <= spec.refine_rounds; ++round) {
    const int g = spec.grid_per_axis;
    std::vector<int> idx(dim, 0);
    Vec x(dim);
    const std::size_t total = [&] {
      std::size_t s = 1;
      for (int i = 0; i < dim; ++i) s *= g;
      return s;
    }();
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int i = 0; i < dim; ++i) {
        idx[i] = static_cast<int>(rem % g);
        rem /= g;
        x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (g - 1.0);
      }
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        const double v = eval_objective(W, which, x, dirs[k], t);
        if (std::isfinite(v) && v < best) {
          best = v;
          best_x = x;
          best_dir = k;
        }
      }
    }
    // shrink the box around the incumbent
    for (int i = 0; i < dim; ++i) {
      const double w = (hi[i] - lo[i]) / spec.refine_zoom;
      lo[i] = best_x[i] - 0.5 * w;
      hi[i] = best_x[i] + 0.5 * w;
    }
  }

  if (spec.polish && std::isfinite(best)) {
    // joint pattern-search polish over (x, direction angles)
    const int n_ang = (dim == 1) ? 0 : (dim == 2 ? 1 : 2);
    Vec z(dim + n_ang);
    for (int i = 0; i < dim; ++i) z[i] = best_x[i];
    if (dim == 2) z[dim] = unit_to_angle(dirs[best_dir]);
    if (dim == 3) {
      const Vec& u = dirs[best_dir];
      const double l2 = norm2(u);
      z[dim] = std::acos(std::clamp(u[2] / l2, -1.0, 1.0));
      z[dim + 1] = std::atan2(u[1], u[0]);
    }
    auto obj = [&](std::span<const double> zz) {
      Vec u = (dim == 1) ? dirs[best_dir]
                         : angles_to_unit(zz.subspan(dim), dim, norm);
      const double v = eval_objective(W, which, zz.subspan(0, dim), u, t);
      return std::isfinite(v) ? v : kInf;
    };
    const double step0 =
        std::max(1e-3, (spec.box_hi[0] - spec.box_lo[0]) /
                           (spec.grid_per_axis * spec.refine_zoom));
    const Vec zmin = compass_minimize(obj, z, step0, 1e-10);
    best = std::min(best, obj(zmin));
    if (dim == 1) {
      // polish the other sign too (Bregman is not y -> -y symmetric)
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        if (k == best_dir) continue;
        auto obj1 = [&](std::span<const double> zz) {
          const double v = eval_objective(W, which, zz.subspan(0, 1), dirs[k], t);
          return std::isfinite(v) ? v : kInf;
        };
        const Vec z1 = compass_minimize(obj1, {best_x[0]}, step0, 1e-10);
        best = std::min(best, obj1(z1));
      }
    }
  }
  if (!std::isfinite(best))
    throw std::runtime_error("modulus search: objective not finite on the search box");
  return best;
}

}  // namespace

double modulus_delta(const ConvexFunction& W, double t, Norm norm,
                     const SearchSpec& spec) {
  const double v = modulus_search(W, Objective::Delta, t, norm, spec);
  return std::max(0.0, v);
}

double modulus_bregman(const ConvexFunction& W, double t, Norm norm,
                       const SearchSpec& spec) {
  const double v = modulus_search(W, Objective::Bregman, t, norm, spec);
  return std::max(0.0, v);
}

double second_difference_sup(const ConvexFunction& V, double t, Norm norm,
                             const SearchSpec& spec) {
  if (t == 0) return 0.0;
  const double v = modulus_search(V, Objective::SecondDiffSup, t, norm, spec);
  return -v;
}

Vec default_modulus_grid(double t_max, int n) {
  Vec g{0.0};
  const double t_min = 1e-3;
  for (int i = 0; i < n; ++i)
    g.push_back(t_min * std::pow(t_max / t_min, i / (n - 1.0)));
  return g;
}

ConvexityModulus tabulate_modulus(ModulusKind kind, const ConvexFunction& W,
                                  Norm norm, const SearchSpec& spec,
                                  std::span<const double> grid) {
  if (kind != ModulusKind::Delta && kind != ModulusKind::Bregman)
    throw std::invalid_argument("tabulate_modulus: kind must be delta or bregman");
  ConvexityModulus m;
  m.kind = kind;
  m.norm = norm;
  m.grid.assign(grid.begin(), grid.end());
  if (m.grid.empty() || m.grid[0] != 0.0)
    throw std::invalid_argument("tabulate_modulus: grid must start at 0");
  m.values.resize(m.grid.size());
  m.values[0] = 0.0;
  for (std::size_t i = 1; i < m.grid.size(); ++i) {
    const double v = (kind == ModulusKind::Delta)
                         ? modulus_delta(W, m.grid[i], norm, spec)
                         : modulus_bregman(W, m.grid[i], norm, spec);
    // moduli are nondecreasing; clamp sub-tolerance search noise
    m.values[i] = std::max(v, m.values[i - 1]);
  }
  m.validate();
  return m;
}

ConvexityModulus convexify_modulus(const ConvexityModulus& m) {
  if (m.kind != ModulusKind::Bregman)
    throw std::invalid_argument("convexify_modulus: input must be a bregman modulus");
  if (m.grid.size() < 3)
    throw std::invalid_argument("convexify_modulus: need at least 3 grid points");
  // lower convex hull (Andrew chain); collinear points kept
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < m.grid.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      const long double cross =
          (static_cast<long double>(m.grid[b]) - m.grid[a]) *
              (static_cast<long double>(m.values[i]) - m.values[a]) -
          (static_cast<long double>(m.values[b]) - m.values[a]) *
              (static_cast<long double>(m.grid[i]) - m.grid[a]);
      if (cross < 0.0L)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  ConvexityModulus out;
  out.kind = ModulusKind::BregmanConvexified;
  out.norm = m.norm;
  out.grid = m.grid;
  out.values.resize(m.grid.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < m.grid.size(); ++i) {
    while (seg + 1 < hull.size() && m.grid[hull[seg + 1]] < m.grid[i]) ++seg;
    const std::size_t a = hull[seg], b = hull[std::min(seg + 1, hull.size() - 1)];
    if (a == b || m.grid[b] == m.grid[a]) {
      out.values[i] = m.values[a];
    } else {
      const double w = (m.grid[i] - m.grid[a]) / (m.grid[b] - m.grid[a]);
      out.values[i] = (1 - w) * m.values[a] + w * m.values[b];
    }
  }
  out.validate();
  return out;
}

ConvexityModulus conjugate_modulus(const ConvexityModulus& m) {
  for (std::size_t i = 1; i < m.values.size(); ++i)
    if (m.values[i] < m.values[i - 1] - 1e-12)
      throw std::invalid_argument("conjugate_modulus: input not nondecreasing");
  ConvexityModulus out;
  out.kind = ModulusKind::BregmanConjugate;
  out.norm = m.norm;
  out.grid = m.grid;
  out.values.assign(m.grid.size(), 0.0);
  for (std::size_t k = 0; k < m.grid.size(); ++k) {
    double best = 0.0;  // s=0 contributes t*0 - 0 = 0
    for (std::size_t j = 0; j < m.grid.size(); ++j)
      best = std::max(best, out.grid[k] * m.grid[j] - m.values[j]);
    out.values[k] = best;
  }
  out.validate();
  return out;
}

// ------------------------------------------------- derivative-form constants

namespace {

double pair_ratio_search(const C1Function1D& f, double expo, double lo, double hi,
                         double sep_min, double sep_max, bool maximize,
                         bool holder_form) {
  // parametrize pairs by midpoint m and log-separation
  auto ratio = [&](double m, double s) {
    double x = m + 0.5 * s, y = m - 0.5 * s;
    if (x > hi || y < lo) return maximize ? -kInf : kInf;
    if (holder_form)
      return std::abs(f.derivative(x) - f.derivative(y)) / std::pow(s, expo);
    return (x - y) * (f.derivative(x) - f.derivative(y)) / std::pow(s, expo);
  };
  double best = maximize ? -kInf : kInf;
  double bm = 0, bs = sep_min;
  double m_lo = lo, m_hi = hi;
  double ls_lo = std::log(sep_min), ls_hi = std::log(sep_max);
  const int gm = 129, gs = 65;
  for (int round = 0; round < 3; ++round) {
    for (int i = 0; i < gm; ++i) {
      const double m = m_lo + (m_hi - m_lo) * i / (gm - 1.0);
      for (int j = 0; j < gs; ++j) {
        const double s = std::exp(ls_lo + (ls_hi - ls_lo) * j / (gs - 1.0));
        const double v = ratio(m, s);
        if (std::isfinite(v) && (maximize ? v > best : v < best)) {
          best = v;
          bm = m;
          bs = s;
        }
      }
    }
    const double wm = (m_hi - m_lo) / 8.0, ws = (ls_hi - ls_lo) / 8.0;
    m_lo = bm - 0.5 * wm;
    m_hi = bm + 0.5 * wm;
    ls_lo = std::log(bs) - 0.5 * ws;
    ls_hi = std::log(bs) + 0.5 * ws;
  }
  auto obj = [&](std::span<const double> z) {
    const double v = ratio(z[0], std::exp(z[1]));
    if (!std::isfinite(v)) return kInf;
    return maximize ? -v : v;
  };
  const Vec z = compass_minimize(obj, {bm, std::log(bs)}, 0.05, 1e-11);
  const double polished = obj(z);
  if (std::isfinite(polished))
    best = maximize ? std::max(best, -polished) : std::min(best, polished);
  return best;
}

}  // namespace

double holder_cp_sup(const C1Function1D& V, double p, double lo, double hi,
                     double sep_min, double sep_max) {
  return pair_ratio_search(V, p, lo, hi, sep_min, sep_max, /*maximize=*/true,
                           /*holder_form=*/true);
}

double monotone_cq_inf(const C1Function1D& W, double q, double lo, double hi,
                       double sep_min, double sep_max) {
  return pair_ratio_search(W, q + 1.0, lo, hi, sep_min, sep_max,
                           /*maximize=*/false, /*holder_form=*/false);
}

double second_diff_upper_constant(const ConvexFunction& V, double p, Norm norm,
                                  const SearchSpec& spec,
                                  std::span<const double> t_grid) {
  double best = 0;
  for (double t : t_grid) {
    if (t <= 0) continue;
    best = std::max(best, second_difference_sup(V, t, norm, spec) /
                              std::pow(t, p + 1.0));
  }
  return best;
}

double second_diff_lower_constant(const ConvexFunction& W, double q, Norm norm,
                                  const SearchSpec& spec,
                                  std::span<const double> t_grid) {
  double best = kInf;
  for (double t : t_grid) {
    if (t <= 0) continue;
    best = std::min(best, modulus_delta(W, t, norm, spec) / std::pow(t, q + 1.0));
  }
  return best;
}

std::string modulus_csv(const ConvexityModulus& m) {
  std::string out = "t,value,kind,norm\n";
  char buf[128];
  for (std::size_t i = 0; i < m.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%s\n", m.grid[i], m.values[i],
                  modulus_kind_name(m.kind).c_str(), norm_name(m.norm).c_str());
    out += buf;
  }
  return out;
}

}  // namespace otlab::measures
