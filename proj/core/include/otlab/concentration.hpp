#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "otlab/density1d.hpp"
#include "otlab/measures.hpp"
#include "otlab/verify.hpp"

namespace otlab::concentration {

using measures::ConvexityModulus;
using measures::Density1D;
using measures::Norm;
using measures::Potential;
using verify::VerificationReport;

/// Base set with closed-form distance in the query norm. Ball means the ball
/// of the query norm, so dist(x, Ball) = max(0, ||x-c|| - R) in every norm.
struct BaseSet {
  enum class Kind { HalfSpace, Ball };
  Kind kind = Kind::HalfSpace;
  Vec normal;          // <n,x> <= offset
  double offset = 0;
  Vec center;
  double radius = 0;

  static BaseSet half_space(Vec n, double c);
  static BaseSet ball(Vec c, double r);
  double distance(std::span<const double> x, Norm norm) const;
};

struct EnlargementQuery {
  BaseSet set;
  double r = 0;
  Norm norm = Norm::L2;
  std::size_t sample_count = 1000000;
  std::uint64_t seed = 0;
};

struct Estimate {
  double value = 0;
  double ci_halfwidth = 0;
};

/// Monte Carlo nu({dist(x, A) <= r}) with a binomial CI (normal approximation,
/// Wilson near the endpoints). Deterministic per (seed, sample_count).
Estimate enlargement_probability(const Potential& pot, const EnlargementQuery& q,
                                 int jobs = 1);

/// Phi(Phi^{-1}(nuA) + sqrt(delta(r/8))/2); delta must cover r/8 on its grid
/// (no extrapolation here).
double ms_profile_bound(double nuA, double r, const ConvexityModulus& delta);
/// 1 - exp(-delta(r/8)/8)/2, valid when nu(A) >= 1/2.
double ms_exp_bound(bool nuA_ge_half, double r, const ConvexityModulus& delta);

using ModulusFn = std::function<double(double)>;
ModulusFn as_fn(const ConvexityModulus& m);
/// b*(t) = sup_{0<s<s_max} (ts - b(s)) by golden-section on the concave
/// objective; exact enough for the equality cases.
ModulusFn conjugate_fn(ModulusFn b, double s_max);

/// Normalized multiplicative perturbation f = e^{g}/Z of a base measure nu;
/// carries g' so that f'/f = g' is exact.
class PerturbedDensity1D {
 public:
  PerturbedDensity1D(const Density1D& nu, std::function<double(double)> g,
                     std::function<double(double)> dg);
  double f(double x) const;           // normalized relative density
  double grad_over_f(double x) const { return dg_(x); }
  double log_f(double x) const;
  const std::function<double(double)>& g() const { return g_; }

 private:
  std::function<double(double)> g_, dg_;
  double log_z_ = 0;
};

/// int b(|T(x)-x|) dnu <= int f log f dnu with T the exact 1D transport
/// nu -> f nu; both sides by quadrature.
VerificationReport talagrand_check(const Density1D& nu,
                                   const PerturbedDensity1D& f, Norm norm,
                                   const ModulusFn& b, double abs_tol,
                                   std::string_view check_id,
                                   std::string_view config_digest);

/// int f log f dnu <= int b*(|f'/f|_*) f dnu.
VerificationReport mlsi_check(const Density1D& nu, const PerturbedDensity1D& f,
                              Norm norm, const ModulusFn& b_conj, double abs_tol,
                              std::string_view check_id,
                              std::string_view config_digest);

struct MartonResult {
  VerificationReport chain;      // e^{2 btilde(r/2)} <= 1/(nu(A) nu(A_r^c))
  VerificationReport displayed;  // e^{2 btilde(r)}   <= same right side
};

/// From known probabilities (exact or MC with CI half-width `ci`).
MartonResult marton_check_values(double nuA, double nuArc, double ci, double r,
                                 const ModulusFn& b_tilde,
                                 std::string_view check_id,
                                 std::string_view config_digest);
/// Monte Carlo wrapper; A_r is the enlargement {dist(x,A) <= r}.
MartonResult marton_check(const Potential& nu, const BaseSet& A, double r,
                          Norm norm, const ModulusFn& b_tilde,
                          std::size_t sample_count, std::uint64_t seed, int jobs,
                          std::string_view check_id,
                          std::string_view config_digest);

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
double ks_distance(std::span<const double> samples,
                   const std::function<double(double)>& cdf);

struct ProfilePoint {
  double r, empirical, profile_bound, exp_bound, ci;
};
std::string profile_csv(std::span<const ProfilePoint> pts);

}  // namespace otlab::concentration
