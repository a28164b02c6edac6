#pragma once

#include <vector>

#include "otlab/numerics.hpp"

namespace otlab::envelope {

/// \int_theta^{pi/2} sin^c x dx, c > -1; computed with the x = s^2 endpoint
/// substitution so the c < 1 singularity at 0 never reaches the quadrature.
double sine_power_integral(double c, double theta = 0.0);

/// Psi of the closed-form envelope:
///   p > 0: Psi(t) = int_t^1 r^{1/p} dr / sqrt(1-r^2),   t in [0,1]
///   p < 0: Psi(t) = int_1^t r^{1/p} dr / sqrt(r^2-1),   t in [1,inf)
double psi(double t, double p);
/// Inverse of Psi on its range; bisection to ~1e-12.
double psi_inverse(double s, double p);

/// f(0) from the half-width a:
///   p > 0: a sqrt(p)  = f(0) int_0^{pi/2} sin^{1/p}
///   p = 0: f(0) = a sqrt(2/pi)
///   p < 0: a sqrt(-p) = f(0) int_0^{pi/2} sin^{-1-1/p}
double f0_from_a(double a, double p);

/// The even solution of f f'' + p (f')^2 = -1 on [-a,a] with f(±a) = 0,
/// evaluated through the closed form (Psi for p != 0, Phi for p = 0).
class EnvelopeFunction {
 public:
  EnvelopeFunction(double p, double a);

  double p() const { return p_; }
  double a() const { return a_; }
  double f0() const { return f0_; }

  double value(double t) const;       // f(|t|), |t| <= a
  double derivative(double t) const;  // from the first integral; -inf at ±a for p >= 0

 private:
  double theta_of(double s) const;  // solves S_c(theta) = s
  double p_ = 0, a_ = 1, f0_ = 1;
  double c_ = 0;        // sine exponent: 1/p (p>0) or -1-1/p (p<0)
  double sqrt_ap_ = 0;  // sqrt(|p|)
  Vec theta_, suffix_;  // tabulated S_c on a theta grid (p != 0)
};

struct OdeTable {
  Vec t, f;
  double f0 = 0;  // shooting value f(0)
};

/// Independent boundary-value oracle: shooting on f(0) with an adaptive
/// Dormand-Prince integrator; the vanishing point is located by bisected
/// re-stepping plus a conserved-quantity tail correction, and f(0) is
/// adjusted by bisection until the zero lands at t = a within 1e-9.
OdeTable envelope_ode_oracle(double p, double a, int n_nodes = 512);

/// Phi(x) = int_0^x ds / sqrt(-2 ln s) = int_{sqrt(-2 ln x)}^inf e^{-s^2/2} ds
double phi_special(double x);
double phi_special_inverse(double s);  // s in [0, sqrt(pi/2)]

/// G(x) = int_0^x ds/f(s) = -f'(x) for the p=0 envelope of half-width a.
/// G(±a) = ±infinity: the pushforward image of Uniform[-a,a] is the full
/// standard Gaussian.
double g_map(double a, double x);

double caffarelli_refinement_bound(double K_lower);  // 1/sqrt(K)

/// sqrt(d-1) diam / (4 int sin^{4/(d-1)})
double measure_set_bound(int d, double diam);
/// sqrt(-p (1 + d/(4(1+p)))) diam / (2 int sin^{-1-1/p}), -1 < p < 0
double measure_set_product_bound(int d, double diam, double p);

/// CSV with columns t,f,minus_df over [-a,a].
std::string envelope_csv(const EnvelopeFunction& env, int n = 512);

}  // namespace otlab::envelope
