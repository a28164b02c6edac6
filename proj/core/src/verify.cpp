#include "otlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "otlab/rng.hpp"

namespace otlab::verify {

using json = nlohmann::ordered_json;

bool finalize(VerificationReport& r) {
  r.passed = r.empirical <= r.theoretical * r.slack + r.abs_tol;
  if (r.inconclusive) r.passed = false;
  return r.passed;
}

namespace {

json witness_json(const Witness& w) {
  json j;
  j["x"] = w.x;
  j["y"] = w.y;
  j["h"] = w.h;
  j["t"] = w.t;
  j["note"] = w.note;
  return j;
}

json report_json(const VerificationReport& r) {
  json j;
  j["check_id"] = r.check_id;
  j["paper_anchor"] = r.anchor;
  j["theoretical"] = r.theoretical;
  j["empirical"] = r.empirical;
  j["slack"] = r.slack;
  j["abs_tol"] = r.abs_tol;
  j["passed"] = r.passed;
  j["vacuous"] = r.vacuous;
  j["inconclusive"] = r.inconclusive;
  j["witness"] = witness_json(r.witness);
  j["seed"] = r.seed;
  j["config_digest"] = r.config_digest;
  j["notes"] = r.notes;
  return j;
}

}  // namespace

std::string to_json(const VerificationReport& r) { return report_json(r).dump(2); }

std::string to_json(std::span<const VerificationReport> rs) {
  json arr = json::array();
  for (const auto& r : rs) arr.push_back(report_json(r));
  return arr.dump(2);
}

std::string summary_table(std::span<const VerificationReport> rs) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-40s %-6s %14s %14s %6s\n", "check", "pass",
                "empirical", "bound", "slack");
  out += buf;
  out += std::string(84, '-') + "\n";
  for (const auto& r : rs) {
    std::snprintf(buf, sizeof buf, "%-40s %-6s %14.6g %14.6g %6.3g%s\n",
                  r.check_id.c_str(),
                  r.passed ? "PASS" : (r.inconclusive ? "INCONC" : "FAIL"),
                  r.empirical, r.theoretical, r.slack,
                  r.vacuous ? " (vacuous)" : "");
    out += buf;
  }
  return out;
}

bool all_passed(std::span<const VerificationReport> rs) {
  return std::all_of(rs.begin(), rs.end(),
                     [](const VerificationReport& r) { return r.passed; });
}

// ------------------------------------------------------------------ sup search

BoxSupResult sup_search_box(
    const std::function<double(std::span<const double>)>& obj, Vec lo, Vec hi,
    const SupSpec& spec, std::uint64_t seed) {
  const std::size_t d = lo.size();
  Rng rng = Rng(seed).stream("sup-search");
  BoxSupResult best;
  best.value = -std::numeric_limits<double>::infinity();
  best.arg.assign(d, 0.0);
  Vec z(d);
  const Vec lo0 = lo, hi0 = hi;
  int n = spec.n_samples;
  for (int round = 0; round <= spec.rounds; ++round) {
    for (int i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) z[k] = rng.uniform(lo[k], hi[k]);
      const double v = obj(z);
      if (std::isfinite(v) && v > best.value) {
        best.value = v;
        best.arg = z;
      }
    }
    for (std::size_t k = 0; k < d; ++k) {
      const double w = (hi[k] - lo[k]) / spec.zoom;
      lo[k] = std::max(lo0[k], best.arg[k] - 0.5 * w);
      hi[k] = std::min(hi0[k], best.arg[k] + 0.5 * w);
    }
    n = std::max(128, n / 2);
  }
  return best;
}

// ------------------------------------------------------------------- checks

namespace {

Vec angles_to_unit_l2(std::span<const double> ang, int dim) {
  if (dim == 1) return {1.0};
  if (dim == 2) return {std::cos(ang[0]), std::sin(ang[0])};
  const double ct = std::cos(ang[0]), st = std::sin(ang[0]);
  return {st * std::cos(ang[1]), st * std::sin(ang[1]), ct};
}

}  // namespace

VerificationReport check_theorem_hoelder(double A_p, double p, double A_q,
                                         double q, const QuotientFn& quotient,
                                         const QuotientSupSpec& spec,
                                         std::uint64_t seed, double slack,
                                         double abs_tol, std::string_view check_id,
                                         std::string_view config_digest,
                                         BoundForm form) {
  if (!(p >= 0 && p <= 1 && q >= 1))
    throw std::domain_error("check_theorem_hoelder: need 0 <= p <= 1 <= q");
  if (!(A_p > 0 && A_q > 0))
    throw std::domain_error("check_theorem_hoelder: constants must be positive");
  const double alpha = (p + 1.0) / (q + 1.0);
  auto bound = [&](double t) {
    if (form == BoundForm::SharperRemark)
      return std::sqrt(A_p / A_q) * t * t;
    return 2.0 * std::pow(A_p / A_q, 1.0 / (q + 1.0)) * std::pow(t, 1.0 + alpha);
  };

  const int n_ang = spec.h_dim == 1 ? 0 : (spec.h_dim == 2 ? 1 : 2);
  Vec lo(spec.x_udim, spec.u_pad), hi(spec.x_udim, 1.0 - spec.u_pad);
  for (int k = 0; k < n_ang; ++k) {
    lo.push_back(0.0);
    hi.push_back(k == 0 && spec.h_dim == 3 ? kPi : 2.0 * kPi);
  }
  lo.push_back(std::log(spec.t_min));
  hi.push_back(std::log(spec.t_max));

  auto obj = [&](std::span<const double> z) {
    const Vec x = spec.x_from_uniform(z.subspan(0, spec.x_udim));
    const Vec h = angles_to_unit_l2(z.subspan(spec.x_udim, n_ang), spec.h_dim);
    const double t = std::exp(z[spec.x_udim + n_ang]);
    return quotient(x, h, t) / bound(t);
  };
  const BoxSupResult sup = sup_search_box(obj, lo, hi, spec.sup, seed);

  VerificationReport r;
  r.check_id = std::string(check_id);
  r.anchor = form == BoundForm::SharperRemark
                 ? "second-difference-bound:sharper-p=q=1"
                 : "second-difference-bound";
  r.theoretical = 1.0;
  r.empirical = sup.value;
  r.slack = slack;
  r.abs_tol = abs_tol;
  r.seed = seed;
  r.config_digest = std::string(config_digest);
  r.witness.x = spec.x_from_uniform(
      std::span<const double>(sup.arg).subspan(0, spec.x_udim));
  r.witness.h = angles_to_unit_l2(
      std::span<const double>(sup.arg).subspan(spec.x_udim, n_ang), spec.h_dim);
  r.witness.t = std::exp(sup.arg[spec.x_udim + n_ang]);
  finalize(r);
  return r;
}

VerificationReport check_gradient_holder(const VecMapFn& map_fn, double alpha,
                                         double C, const PairSampler& pairs,
                                         const SupSpec& spec, std::uint64_t seed,
                                         double slack, double abs_tol,
                                         std::string_view check_id,
                                         std::string_view config_digest) {
  if (!(alpha > 0 && alpha <= 1))
    throw std::domain_error("check_gradient_holder: alpha in (0,1]");
  Vec lo(pairs.udim, 1e-9), hi(pairs.udim, 1.0 - 1e-9);
  auto obj = [&](std::span<const double> z) {
    const auto [x, y] = pairs.pair_from_uniform(z);
    Vec d(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) d[k] = x[k] - y[k];
    const double sep = norm2(d);
    if (sep <= 0) return -1.0;
    const Vec tx = map_fn(x), ty = map_fn(y);
    Vec td(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) td[k] = tx[k] - ty[k];
    return norm2(td) / std::pow(sep, alpha);
  };
  const BoxSupResult sup = sup_search_box(obj, lo, hi, spec, seed);

  VerificationReport r;
  r.check_id = std::string(check_id);
  r.anchor = "gradient-holder";
  r.theoretical = C;
  r.empirical = sup.value;
  r.slack = slack;
  r.abs_tol = abs_tol;
  r.seed = seed;
  r.config_digest = std::string(config_digest);
  const auto [wx, wy] = pairs.pair_from_uniform(sup.arg);
  r.witness.x = wx;
  r.witness.y = wy;
  finalize(r);
  return r;
}

VerificationReport sodin_bound_check(const measures::ConvexFunction& f,
                                     const Vec& x, double t, const Vec& h,
                                     int direction_count, double slack,
                                     std::string_view check_id,
                                     std::string_view config_digest) {
  if (!(t > 0)) throw std::domain_error("sodin_bound_check: t > 0 required");
  const int d = f.dim;
  Vec xth(d), gx(d), gxth(d);
  for (int k = 0; k < d; ++k) xth[k] = x[k] + t * h[k];
  f.gradient(x, gx);
  f.gradient(xth, gxth);
  Vec gd(d);
  for (int k = 0; k < d; ++k) gd[k] = gxth[k] - gx[k];
  const double lhs = norm2(gd);

  double sup2 = 0;
  Vec best_v(d, 0.0);
  const double fx = f.value(x);
  Vec xp(d), xm(d);
  auto try_dir = [&](const Vec& v) {
    for (int k = 0; k < d; ++k) {
      xp[k] = x[k] + 2.0 * t * v[k];
      xm[k] = x[k] - 2.0 * t * v[k];
    }
    const double q = f.value(xp) + f.value(xm) - 2.0 * fx;
    if (q < -1e-9)
      throw std::runtime_error("sodin_bound_check: convexity violated on samples");
    if (q > sup2) {
      sup2 = q;
      best_v = v;
    }
  };
  if (d == 1) {
    try_dir({1.0});
  } else if (d == 2) {
    for (int k = 0; k < direction_count; ++k) {
      const double th = 2.0 * kPi * k / direction_count;
      try_dir({std::cos(th), std::sin(th)});
    }
  } else {
    // Fibonacci sphere
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < direction_count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / direction_count;
      const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      try_dir({rr * std::cos(ga * k), rr * std::sin(ga * k), z});
    }
  }
  const double rhs = 2.0 / t * sup2;

  VerificationReport r;
  r.check_id = std::string(check_id);
  r.anchor = "gradient-vs-second-difference";
  r.theoretical = rhs;
  r.empirical = lhs;
  r.slack = slack;
  r.abs_tol = 1e-12;
  r.witness.x = x;
  r.witness.h = h;
  r.witness.y = best_v;
  r.witness.t = t;
  r.config_digest = std::string(config_digest);
  finalize(r);
  return r;
}

VerificationReport ms_modulus_bound_check(const VecMapFn& map_fn,
                                          const measures::ConvexityModulus& delta,
                                          const PairSampler& pairs,
                                          const SupSpec& spec, std::uint64_t seed,
                                          double slack, double abs_tol,
                                          std::string_view check_id,
                                          std::string_view config_digest) {
  bool extrapolated = false;
  auto obj = [&](std::span<const double> z) {
    const auto [x, y] = pairs.pair_from_uniform(z);
    Vec d(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) d[k] = x[k] - y[k];
    const double sep2 = dot(d, d);
    if (sep2 <= 0) return -1.0;
    const auto inv = delta.inverse(4.0 * sep2);
    if (inv.extrapolated) extrapolated = true;
    if (!(inv.value > 0)) return -1.0;
    const Vec tx = map_fn(x), ty = map_fn(y);
    Vec td(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) td[k] = tx[k] - ty[k];
    return norm2(td) / (8.0 * inv.value);
  };
  Vec lo(pairs.udim, 1e-9), hi(pairs.udim, 1.0 - 1e-9);
  const BoxSupResult sup = sup_search_box(obj, lo, hi, spec, seed);

  VerificationReport r;
  r.check_id = std::string(check_id);
  r.anchor = "modulus-gradient-bound";
  r.theoretical = 1.0;
  r.empirical = sup.value;
  r.slack = slack;
  r.abs_tol = abs_tol;
  r.seed = seed;
  r.config_digest = std::string(config_digest);
  if (extrapolated)
    r.notes = "delta^{-1} extrapolated beyond the tabulated grid by the fitted "
              "dominant power for some pairs";
  const auto [wx, wy] = pairs.pair_from_uniform(sup.arg);
  r.witness.x = wx;
  r.witness.y = wy;
  finalize(r);
  return r;
}

VerificationReport second_order_envelope_check(
    const transportnd::EntropicTransport& tp, const measures::ConvexBody& body,
    const Vec& h, double Lambda, std::optional<double> M, double p_choice,
    std::span<const Vec> points, double t_fd, double slack, double abs_tol,
    std::string_view check_id, std::string_view config_digest) {
  const auto [t0, a] = transportnd::supporting_slab(body, h);
  if (!(p_choice > -1.0))
    throw std::domain_error("second_order_envelope_check: p > -1 required");
  const double coeff =
      M ? std::sqrt(Lambda + (*M) * (*M) / (4.0 * (1.0 + p_choice)))
        : std::sqrt(Lambda);
  const envelope::EnvelopeFunction env(p_choice, a);

  double worst_ratio = -std::numeric_limits<double>::infinity();
  Vec worst_x;
  double worst_t = 0;
  for (const Vec& x : points) {
    const double phi_h = tp.directional_derivative(x, h);
    const double arg = phi_h - t0;
    if (std::abs(arg) > a * (1.0 + 1e-6))
      throw std::runtime_error(
          "second_order_envelope_check: phi_h - t0 outside [-a,a]; transport "
          "inaccuracy");
    const double phi_hh = tp.potential_second_quotient(x, h, t_fd) / (t_fd * t_fd);
    const double bound = coeff * env.value(std::clamp(arg, -a, a));
    if (!(bound > 0)) continue;
    const double ratio = phi_hh / bound;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_x = x;
      worst_t = arg;
    }
  }

  VerificationReport r;
  r.check_id = std::string(check_id);
  r.anchor = M ? "second-derivative-envelope:dimension-free"
               : "second-derivative-envelope";
  r.theoretical = 1.0;
  r.empirical = worst_ratio;
  r.slack = slack;
  r.abs_tol = abs_tol;
  r.config_digest = std::string(config_digest);
  r.witness.x = worst_x;
  r.witness.h = h;
  r.witness.t = worst_t;
  r.inconclusive = !tp.converged();
  if (r.inconclusive)
    r.notes = "entropic solve did not converge; check inconclusive";
  finalize(r);
  return r;
}

}  // namespace otlab::verify
