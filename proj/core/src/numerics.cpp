#include "otlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace otlab {

// ---------------- quadrature ----------------

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const Fn1D& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const Fn1D& f, double a, double b, double rel_tol,
                        double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  const double whole = simpson(fa, fm, fb, b - a);
  const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double adaptive_simpson_split(const Fn1D& f, double a, double b,
                              std::span<const double> breaks, double rel_tol,
                              double abs_tol) {
  Vec pts{a};
  for (double c : breaks)
    if (c > a && c < b) pts.push_back(c);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += adaptive_simpson(f, pts[i], pts[i + 1], rel_tol, abs_tol);
  return total;
}

namespace {

struct GLRule {
  Vec x, w;  // nodes/weights on [-1,1]
};

// Nodes via Newton iteration on Legendre polynomials; computed once per order.
GLRule make_gl(int n) {
  GLRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}

const GLRule& gl_rule(int n) {
  static const GLRule g8 = make_gl(8);
  static const GLRule g16 = make_gl(16);
  static const GLRule g32 = make_gl(32);
  static const GLRule g64 = make_gl(64);
  switch (n) {
    case 8: return g8;
    case 16: return g16;
    case 32: return g32;
    case 64: return g64;
    default: throw std::invalid_argument("gauss_legendre: order must be 8/16/32/64");
  }
}

}  // namespace

double gauss_legendre(const Fn1D& f, double a, double b, int n) {
  const GLRule& r = gl_rule(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < n; ++i) s += r.w[i] * f(c + h * r.x[i]);
  return s * h;
}

// ---------------- roots / optimization ----------------

double bisect(const Fn1D& f, double lo, double hi, double x_tol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("bisect: no sign change on bracket");
  for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
    const double m = 0.5 * (lo + hi);
    const double fm = f(m);
    if (fm == 0) return m;
    if ((fm > 0) == (flo > 0)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

double brent_root(const Fn1D& f, double lo, double hi, double x_tol,
                  int max_iter) {
  double a = lo, b = hi, fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0))
    throw std::invalid_argument("brent_root: no sign change on bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * x_tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r_;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r_ = fb / fc;
        p = s * (2.0 * xm * q * (q - r_) - (b - a) * (r_ - 1.0));
        q = (q - 1.0) * (r_ - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

double golden_max(const Fn1D& f, double lo, double hi, double x_tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Vec compass_minimize(const std::function<double(std::span<const double>)>& f,
                     Vec x0, double step0, double step_tol, int max_iter) {
  const std::size_t d = x0.size();
  double step = step0;
  double best = f(x0);
  Vec trial = x0;
  int it = 0;
  while (step > step_tol && it < max_iter) {
    bool improved = false;
    for (std::size_t k = 0; k < d; ++k) {
      for (double s : {+1.0, -1.0}) {
        trial = x0;
        trial[k] += s * step;
        const double v = f(trial);
        ++it;
        if (v < best) {
          best = v;
          x0 = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return x0;
}

// ---------------- monotone cubic ----------------

MonotoneCubic::MonotoneCubic(Vec x, Vec y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw std::invalid_argument("MonotoneCubic: need >=2 matching nodes");
  m_.assign(n, 0.0);
  Vec d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x_[i + 1] - x_[i];
    if (h <= 0) throw std::invalid_argument("MonotoneCubic: nodes not increasing");
    d[i] = (y_[i + 1] - y_[i]) / h;
  }
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0) {
      m_[i] = 0.0;
    } else {
      // Fritsch-Carlson weighted harmonic mean keeps the interpolant monotone
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
      m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
    } else {
      const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        m_[i] = tau * a * d[i];
        m_[i + 1] = tau * b * d[i];
      }
    }
  }
}

MonotoneCubic::MonotoneCubic(Vec x, Vec y, Vec slopes)
    : x_(std::move(x)), y_(std::move(y)), m_(std::move(slopes)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n || m_.size() != n)
    throw std::invalid_argument("MonotoneCubic: need >=2 matching nodes/slopes");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x_[i + 1] - x_[i];
    if (h <= 0) throw std::invalid_argument("MonotoneCubic: nodes not increasing");
    const double d = (y_[i + 1] - y_[i]) / h;
    if (d == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    // clip into the Fritsch-Carlson monotonicity box
    for (std::size_t k : {i, i + 1}) {
      if (m_[k] / d < 0) m_[k] = 0.0;
      if (std::abs(m_[k]) > 3.0 * std::abs(d)) m_[k] = 3.0 * d;
    }
  }
}

std::size_t MonotoneCubic::locate(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return x_.size() - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double MonotoneCubic::operator()(double x) const {
  const std::size_t i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
  const std::size_t i = locate(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
  return d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
}

// ---------------- special functions ----------------

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double gaussian_upper_tail(double z) {
  return std::sqrt(kPi / 2.0) * std::erfc(z / std::sqrt(2.0));
}

// AS241 (Wichura): rational approximations for the normal quantile.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  r = (q < 0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return (q < 0) ? -val : val;
}

// ---------------- reductions ----------------

namespace {
double pairwise_rec(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_rec(v.subspan(0, h)) + pairwise_rec(v.subspan(h));
}
}  // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_rec(v); }

// ---------------- misc ----------------

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void parallel_blocks(std::size_t n, int jobs,
                     const std::function<void(std::size_t, std::size_t)>& body,
                     std::size_t block) {
  if (n == 0) return;
  const std::size_t nblocks = (n + block - 1) / block;
  if (jobs <= 1 || nblocks == 1) {
    for (std::size_t b = 0; b < nblocks; ++b)
      body(b * block, std::min(n, (b + 1) * block));
    return;
  }
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&]() {
    for (;;) {
      std::size_t b;
      {
        std::lock_guard<std::mutex> lk(mu);
        if (next >= nblocks) return;
        b = next++;
      }
      body(b * block, std::min(n, (b + 1) * block));
    }
  };
  const int t = std::min<std::size_t>(jobs, nblocks);
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int i = 0; i < t; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace otlab
