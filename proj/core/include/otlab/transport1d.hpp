#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "otlab/density1d.hpp"
#include "otlab/measures.hpp"

namespace otlab::transport1d {

/// Thrown when the map derivative is requested where the target density
/// vanishes (the envelope-boundary condition).
struct TargetBoundaryError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Exact 1D optimal (monotone) transport T = Q_nu . F_mu between absolutely
/// continuous laws, with the analytic derivative T'(x) = rho_mu(x)/rho_nu(T(x))
/// from the change of variables. Immutable and safe to share.
class TransportMap1D {
 public:
  TransportMap1D(measures::Density1DPtr source, measures::Density1DPtr target);

  double map(double x) const;       // T(x)
  double inverse(double y) const;   // T^{-1}(y)
  double derivative(double x) const;
  /// phi(x+t)+phi(x-t)-2 phi(x) = int_0^t (T(x+s)-T(x-s)) ds, phi' = T
  double potential_second_quotient(double x, double t) const;
  /// x-interval covering source quantiles [u_eps, 1-u_eps]
  std::pair<double, double> source_band(double u_eps = 1e-6) const;

  const measures::Density1D& source() const { return *source_; }
  const measures::Density1D& target() const { return *target_; }

 private:
  measures::Density1DPtr source_, target_;
};

TransportMap1D build_map_1d(const measures::Potential& source,
                            const measures::Potential& target,
                            int resolution = 4096);

struct Theorem1Constant {
  double constant;
  double alpha;
};

/// ((q+1) C_p / ((p+1) C_q))^{1/(q+1)} and alpha = (p+1)/(q+1);
/// requires 0 <= p <= 1 <= q and positive constants.
Theorem1Constant theorem1_constant(double p, double q, double C_p, double C_q);

struct PairSpec {
  double t_min = 1e-3;
  double t_max = 4.0;
  int n_pairs = 4096;
  int refine_rounds = 3;
  double zoom = 8.0;
  double u_band = 1e-6;  // tails outside [u_band, 1-u_band] excluded
};

struct HolderEstimate {
  double value = 0;
  double x = 0, y = 0;  // maximizing pair
};

/// sup over sampled pairs of |T(x)-T(y)| / |x-y|^alpha with deterministic
/// stratified sampling plus local refinement around the incumbent.
HolderEstimate empirical_holder_1d(const TransportMap1D& T, double alpha,
                                   const PairSpec& spec, std::uint64_t seed);

/// CSV with columns x,T,dT over an n-point source-quantile grid.
std::string map_csv(const TransportMap1D& T, int n = 512);

}  // namespace otlab::transport1d
