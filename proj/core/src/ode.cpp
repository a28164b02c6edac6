#include "otlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace otlab {

Dopri5::Dopri5(Rhs rhs, double rel_tol, double abs_tol)
    : rhs_(std::move(rhs)), rel_tol_(rel_tol), abs_tol_(abs_tol) {}

namespace {
// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
}  // namespace

bool Dopri5::step(double t, const State& y, const State& k1, double h,
                  State& y_out, State& dy_out, double& err) const {
  State k2, k3, k4, k5, k6, k7, yt;
  auto at = [&](const State& base, auto... terms) {
    State out;
    for (int i = 0; i < 2; ++i) {
      double acc = base[i];
      ((acc += terms.first * terms.second[i]), ...);
      out[i] = acc;
    }
    return out;
  };
  using P = std::pair<double, const State&>;
  yt = at(y, P{h * a21, k1});
  k2 = rhs_(t + c2 * h, yt);
  yt = at(y, P{h * a31, k1}, P{h * a32, k2});
  k3 = rhs_(t + c3 * h, yt);
  yt = at(y, P{h * a41, k1}, P{h * a42, k2}, P{h * a43, k3});
  k4 = rhs_(t + c4 * h, yt);
  yt = at(y, P{h * a51, k1}, P{h * a52, k2}, P{h * a53, k3}, P{h * a54, k4});
  k5 = rhs_(t + c5 * h, yt);
  yt = at(y, P{h * a61, k1}, P{h * a62, k2}, P{h * a63, k3}, P{h * a64, k4},
          P{h * a65, k5});
  k6 = rhs_(t + h, yt);
  y_out = at(y, P{h * b1, k1}, P{h * b3, k3}, P{h * b4, k4}, P{h * b5, k5},
             P{h * b6, k6});
  k7 = rhs_(t + h, y_out);
  dy_out = k7;

  err = 0;
  for (int i = 0; i < 2; ++i) {
    const double y4 = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                  e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double sc =
        abs_tol_ + rel_tol_ * std::max(std::abs(y[i]), std::abs(y_out[i]));
    const double d = (y_out[i] - y4) / sc;
    err += d * d;
  }
  err = std::sqrt(err / 2.0);
  return std::isfinite(err) && err <= 1.0;
}

std::vector<Dopri5::Node> Dopri5::integrate_until(
    double t0, const State& y0, double t_max,
    const std::function<bool(const State&)>& keep_going, double t_tol) {
  std::vector<Node> traj;
  double t = t0;
  State y = y0;
  State dy = rhs_(t, y);
  traj.push_back({t, y, dy});
  if (!keep_going(y)) return traj;

  double h = std::min(1e-4 * std::max(1.0, t_max - t0), t_max - t0);
  const double h_min = 1e-15 * std::max(1.0, std::abs(t_max));
  int rejects_in_row = 0;

  while (t < t_max) {
    h = std::min(h, t_max - t);
    State yn, dyn;
    double err;
    const bool ok = step(t, y, dy, h, yn, dyn, err);
    if (!ok) {
      h = std::max(h * std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.1, 0.5),
                   h_min);
      if (++rejects_in_row > 200)
        throw std::runtime_error("Dopri5: step size underflow");
      continue;
    }
    rejects_in_row = 0;
    if (!keep_going(yn)) {
      // bisect the step length so the accepted endpoint lies on the boundary
      double lo = 0.0, hi = h;
      State y_hi = yn, dy_hi = dyn;
      while (hi - lo > std::max(t_tol, 1e-16 * std::max(1.0, std::abs(t)))) {
        const double mid = 0.5 * (lo + hi);
        State ym, dym;
        double e2;
        step(t, y, dy, mid, ym, dym, e2);
        if (keep_going(ym)) {
          lo = mid;
        } else {
          hi = mid;
          y_hi = ym;
          dy_hi = dym;
        }
      }
      t += hi;
      traj.push_back({t, y_hi, dy_hi});
      return traj;
    }
    t += h;
    y = yn;
    dy = dyn;
    traj.push_back({t, y, dy});
    h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
  }
  return traj;
}

Dopri5::State Dopri5::sample(const std::vector<Node>& traj, double t) {
  if (traj.empty()) throw std::invalid_argument("Dopri5::sample: empty trajectory");
  if (t <= traj.front().t) return traj.front().y;
  if (t >= traj.back().t) return traj.back().y;
  std::size_t lo = 0, hi = traj.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (traj[mid].t <= t ? lo : hi) = mid;
  }
  const Node& A = traj[lo];
  const Node& B = traj[hi];
  const double h = B.t - A.t;
  const double s = (t - A.t) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  State out;
  for (int i = 0; i < 2; ++i)
    out[i] = h00 * A.y[i] + h10 * h * A.dy[i] + h01 * B.y[i] + h11 * h * B.dy[i];
  return out;
}

}  // namespace otlab
