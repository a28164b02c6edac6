#include "otlab/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otlab/ode.hpp"

namespace otlab::envelope {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kThetaNodes = 2048;
}  // namespace

double sine_power_integral(double c, double theta) {
  if (!(c > -1.0)) throw std::domain_error("sine_power_integral: c > -1 required");
  if (theta < 0 || theta > 0.5 * kPi + 1e-12)
    throw std::domain_error("sine_power_integral: theta in [0, pi/2]");
  theta = std::min(theta, 0.5 * kPi);
  // x = s^2 moves the sin^c endpoint behavior to s^{2c+1}
  auto g = [c](double s) { return 2.0 * s * std::pow(std::sin(s * s), c); };
  return adaptive_simpson(g, std::sqrt(theta), std::sqrt(0.5 * kPi), 1e-13, 1e-300);
}

namespace {

double sine_exponent(double p) {
  if (p > 0) return 1.0 / p;
  return -1.0 - 1.0 / p;  // p in (-1,0)
}

}  // namespace

double psi(double t, double p) {
  if (p == 0) throw std::domain_error("psi: p must be nonzero");
  if (p < -1) throw std::domain_error("psi: p > -1 required");
  const double c = sine_exponent(p);
  if (p > 0) {
    if (t < -1e-14 || t > 1.0 + 1e-14)
      throw std::domain_error("psi: t in [0,1] for p > 0");
    return sine_power_integral(c, std::asin(std::clamp(t, 0.0, 1.0)));
  }
  if (t < 1.0 - 1e-14) throw std::domain_error("psi: t >= 1 for p < 0");
  return sine_power_integral(c, std::asin(std::clamp(1.0 / t, 0.0, 1.0)));
}

double psi_inverse(double s, double p) {
  if (p == 0) throw std::domain_error("psi_inverse: p must be nonzero");
  const double c = sine_exponent(p);
  const double s_max = sine_power_integral(c, 0.0);
  if (s < -1e-14 || s > s_max * (1.0 + 1e-12))
    throw std::domain_error("psi_inverse: s outside the range of Psi");
  s = std::clamp(s, 0.0, s_max);
  if (s == 0.0) return 1.0;
  if (s == s_max) return p > 0 ? 0.0 : kInf;
  const double theta = brent_root(
      [&](double th) { return sine_power_integral(c, th) - s; }, 0.0, 0.5 * kPi,
      1e-15);
  return p > 0 ? std::sin(theta) : 1.0 / std::sin(theta);
}

double f0_from_a(double a, double p) {
  if (!(a > 0)) throw std::domain_error("f0_from_a: a > 0 required");
  if (!(p > -1.0)) throw std::domain_error("f0_from_a: p > -1 required");
  if (p == 0.0) return a * std::sqrt(2.0 / kPi);
  const double c = sine_exponent(p);
  return a * std::sqrt(std::abs(p)) / sine_power_integral(c, 0.0);
}

// ------------------------------------------------------------ EnvelopeFunction

EnvelopeFunction::EnvelopeFunction(double p, double a) : p_(p), a_(a) {
  if (!(a > 0)) throw std::domain_error("EnvelopeFunction: a > 0 required");
  if (!(p > -1.0)) throw std::domain_error("EnvelopeFunction: p > -1 required");
  f0_ = f0_from_a(a, p);
  if (p_ == 0.0) return;
  c_ = sine_exponent(p_);
  sqrt_ap_ = std::sqrt(std::abs(p_));
  // suffix table of S_c(theta) on a uniform theta grid
  theta_.resize(kThetaNodes + 1);
  suffix_.assign(kThetaNodes + 1, 0.0);
  for (int i = 0; i <= kThetaNodes; ++i)
    theta_[i] = 0.5 * kPi * i / kThetaNodes;
  auto cell = [&](double lo, double hi) {
    auto g = [this](double s) { return 2.0 * s * std::pow(std::sin(s * s), c_); };
    return gauss_legendre(g, std::sqrt(lo), std::sqrt(hi), 16);
  };
  for (int i = kThetaNodes - 1; i >= 0; --i)
    suffix_[i] = suffix_[i + 1] + cell(theta_[i], theta_[i + 1]);
  // normalize f0 against the same table so that f(±a) lands exactly on
  // theta = 0 (the independent f0_from_a value differs by quadrature noise)
  f0_ = a_ * sqrt_ap_ / suffix_[0];
}

double EnvelopeFunction::theta_of(double s) const {
  // locate the grid cell with suffix_[i] >= s >= suffix_[i+1], then refine
  std::size_t lo = 0, hi = kThetaNodes;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (suffix_[mid] >= s ? lo : hi) = mid;
  }
  auto S = [&](double th) {
    // S_c(th) = suffix_[hi] + int_th^{theta_[hi]}, via the x = s^2 substitution
    auto g = [this](double s) { return 2.0 * s * std::pow(std::sin(s * s), c_); };
    return suffix_[hi] + gauss_legendre(g, std::sqrt(th), std::sqrt(theta_[hi]), 16);
  };
  if (s >= suffix_[lo]) return theta_[lo];
  if (s <= suffix_[hi]) return theta_[hi];
  return brent_root([&](double th) { return S(th) - s; }, theta_[lo], theta_[hi],
                    1e-15);
}

double EnvelopeFunction::value(double t) const {
  t = std::abs(t);
  if (t > a_ * (1.0 + 1e-9))
    throw std::domain_error("EnvelopeFunction::value: |t| > a");
  t = std::min(t, a_);
  if (p_ == 0.0) {
    const double arg = std::sqrt(0.5 * kPi) - t / f0_;
    return f0_ * phi_special_inverse(std::clamp(arg, 0.0, std::sqrt(0.5 * kPi)));
  }
  const double s = sqrt_ap_ * t / f0_;
  if (s >= suffix_[0]) return 0.0;
  const double th = theta_of(s);
  const double e = std::abs(1.0 / p_);
  return f0_ * std::pow(std::sin(th), e);
}

double EnvelopeFunction::derivative(double t) const {
  const double sign = t >= 0 ? 1.0 : -1.0;
  const double f = value(t);
  if (f <= 0.0) {
    if (p_ < 0) return -sign / std::sqrt(-p_);
    return -sign * kInf;
  }
  if (p_ == 0.0) {
    const double r = std::min(f / f0_, 1.0);
    return -sign * std::sqrt(std::max(0.0, -2.0 * std::log(r)));
  }
  const double ratio = std::pow(f0_ / f, 2.0 * p_);
  return -sign * std::sqrt(std::max(0.0, (ratio - 1.0) / p_));
}

// ----------------------------------------------------------------- ODE oracle

namespace {

struct ShotResult {
  double zero = 0;                       // location of f = 0
  std::vector<Dopri5::Node> trajectory;  // up to the stop threshold
  double t_stop = 0, f_stop = 0, v_stop = 0;
  double invariant = 0;  // E = f^{2p}(1+p v^2), or f e^{v^2/2} at p=0
};

// remaining time for f to fall from g0 to 0 along the conserved quantity
double tail_time(double p, double E, double g0) {
  if (g0 <= 0) return 0;
  if (p > 0) {
    // dt = sqrt(p) g^p / sqrt(E - g^{2p}) dg, g = g0 u^{1/(1+p)}
    auto h = [&](double u) {
      const double gp2 = std::pow(g0, 2.0 * p) * std::pow(u, 2.0 * p / (1.0 + p));
      return 1.0 / std::sqrt(std::max(E - gp2, 1e-300));
    };
    return std::sqrt(p) * std::pow(g0, 1.0 + p) / (1.0 + p) *
           gauss_legendre(h, 0.0, 1.0, 64);
  }
  if (p < 0) {
    const double q = -p;
    // dt = sqrt(q) dg / sqrt(1 - E g^{2q}); with E g^{2q} = sin^2 psi the
    // cosine cancels and dt = E^{-1/(2q)}/sqrt(q) sin^{1/q-1} psi dpsi
    const double psi_max =
        std::asin(std::clamp(std::sqrt(E) * std::pow(g0, q), 0.0, 1.0));
    auto h = [&](double ps) { return std::pow(std::sin(ps), 1.0 / q - 1.0); };
    const double integral = gauss_legendre(h, 0.0, psi_max, 64);
    return integral / (std::sqrt(q) * std::pow(E, 1.0 / (2.0 * q)));
  }
  // p = 0: invariant c = g e^{v^2/2}; dt = dg / sqrt(2 ln(c/g))
  return E * gaussian_upper_tail(std::sqrt(std::max(0.0, 2.0 * std::log(E / g0))));
}

ShotResult shoot(double p, double c, double a_scale) {
  Dopri5 solver(
      [p](double, const Dopri5::State& y) {
        return Dopri5::State{y[1], -(1.0 + p * y[1] * y[1]) / y[0]};
      },
      1e-12, 1e-14);
  const double f_stop = 1e-7 * c;
  const double t_max = 10.0 * c + 10.0 * a_scale;
  auto traj = solver.integrate_until(0.0, {c, 0.0}, t_max,
                                     [f_stop](const Dopri5::State& y) {
                                       return y[0] > f_stop;
                                     });
  ShotResult r;
  r.trajectory = std::move(traj);
  const auto& last = r.trajectory.back();
  r.t_stop = last.t;
  r.f_stop = last.y[0];
  r.v_stop = last.y[1];
  if (p == 0.0)
    r.invariant = r.f_stop * std::exp(0.5 * r.v_stop * r.v_stop);
  else
    r.invariant = std::pow(r.f_stop, 2.0 * p) * (1.0 + p * r.v_stop * r.v_stop);
  r.zero = r.t_stop + tail_time(p, r.invariant, r.f_stop);
  return r;
}

}  // namespace

OdeTable envelope_ode_oracle(double p, double a, int n_nodes) {
  if (!(p > -1.0)) throw std::domain_error("envelope_ode_oracle: p > -1 required");
  if (!(a > 0)) throw std::domain_error("envelope_ode_oracle: a > 0 required");
  if (n_nodes < 2) throw std::invalid_argument("envelope_ode_oracle: n_nodes >= 2");

  auto zero_of = [&](double c) { return shoot(p, c, a).zero; };

  // the vanishing point scales linearly in f(0); bracket around the 2-point estimate
  const double z1 = zero_of(a);
  double c_est = a * a / z1;
  double lo = 0.9 * c_est, hi = 1.1 * c_est;
  double zlo = zero_of(lo), zhi = zero_of(hi);
  for (int k = 0; k < 12 && !(zlo < a && a < zhi); ++k) {
    if (zlo >= a) {
      lo *= 0.7;
      zlo = zero_of(lo);
    }
    if (zhi <= a) {
      hi *= 1.4;
      zhi = zero_of(hi);
    }
  }
  if (!(zlo < a && a < zhi)) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "envelope_ode_oracle: shooting bracket failure, f(0) in "
                  "[%.6g, %.6g] gives zeros [%.6g, %.6g], target a=%.6g",
                  lo, hi, zlo, zhi, a);
    throw std::runtime_error(msg);
  }
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    c = 0.5 * (lo + hi);
    const double z = zero_of(c);
    if (std::abs(z - a) <= 1e-10 || (hi - lo) <= 1e-14 * c) break;
    if (z < a)
      lo = c;
    else
      hi = c;
  }

  const ShotResult shot = shoot(p, c, a);
  OdeTable out;
  out.f0 = c;
  out.t.resize(n_nodes);
  out.f.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const double t = a * i / (n_nodes - 1.0);
    out.t[i] = t;
    if (t <= shot.t_stop) {
      out.f[i] = Dopri5::sample(shot.trajectory, t)[0];
    } else if (t >= shot.zero) {
      out.f[i] = 0.0;
    } else {
      // invert the conserved-quantity tail clock
      const double target = shot.zero - t;
      double flo = 0, fhi = shot.f_stop;
      for (int k = 0; k < 80; ++k) {
        const double fm = 0.5 * (flo + fhi);
        (tail_time(p, shot.invariant, fm) < target ? flo : fhi) = fm;
      }
      out.f[i] = 0.5 * (flo + fhi);
    }
  }
  return out;
}

// ------------------------------------------------------------- Phi and G map

double phi_special(double x) {
  if (x < -1e-15 || x > 1.0 + 1e-15)
    throw std::domain_error("phi_special: x in [0,1]");
  x = std::clamp(x, 0.0, 1.0);
  if (x == 0.0) return 0.0;
  if (x == 1.0) return std::sqrt(0.5 * kPi);
  return gaussian_upper_tail(std::sqrt(-2.0 * std::log(x)));
}

double phi_special_inverse(double s) {
  const double s_max = std::sqrt(0.5 * kPi);
  if (s < -1e-15 || s > s_max * (1.0 + 1e-14))
    throw std::domain_error("phi_special_inverse: s in [0, sqrt(pi/2)]");
  s = std::clamp(s, 0.0, s_max);
  if (s == 0.0) return 0.0;
  if (s == s_max) return 1.0;
  return brent_root([s](double x) { return phi_special(x) - s; }, 1e-300, 1.0,
                    1e-16);
}

double g_map(double a, double x) {
  if (std::abs(x) > a * (1.0 + 1e-12))
    throw std::domain_error("g_map: |x| > a");
  const EnvelopeFunction env(0.0, a);
  return -env.derivative(std::clamp(x, -a, a));
}

// --------------------------------------------------------------- §4 constants

double caffarelli_refinement_bound(double K_lower) {
  if (!(K_lower > 0))
    throw std::domain_error("caffarelli_refinement_bound: K > 0 required");
  return 1.0 / std::sqrt(K_lower);
}

double measure_set_bound(int d, double diam) {
  if (d < 2) throw std::domain_error("measure_set_bound: d >= 2 required");
  if (!(diam > 0)) throw std::domain_error("measure_set_bound: diam > 0");
  return std::sqrt(d - 1.0) * diam /
         (4.0 * sine_power_integral(4.0 / (d - 1.0), 0.0));
}

double measure_set_product_bound(int d, double diam, double p) {
  if (d < 2) throw std::domain_error("measure_set_product_bound: d >= 2 required");
  if (!(diam > 0)) throw std::domain_error("measure_set_product_bound: diam > 0");
  if (!(p > -1.0 && p < 0.0))
    throw std::domain_error("measure_set_product_bound: p in (-1,0) required");
  return std::sqrt(-p * (1.0 + d / (4.0 * (1.0 + p)))) * diam /
         (2.0 * sine_power_integral(-1.0 - 1.0 / p, 0.0));
}

std::string envelope_csv(const EnvelopeFunction& env, int n) {
  std::string out = "t,f,minus_df\n";
  char buf[128];
  for (int i = 0; i < n; ++i) {
    const double t = -env.a() + 2.0 * env.a() * i / (n - 1.0);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, env.value(t),
                  -env.derivative(t));
    out += buf;
  }
  return out;
}

}  // namespace otlab::envelope
