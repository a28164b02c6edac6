#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "otlab/measures.hpp"

namespace otlab::transportnd {

struct SolveParams {
  int n = 2000;
  int m = 2000;
  double epsilon = 0;  // 0: default 5e-3 * diam^2 of the target
  double tol = 1e-6;   // L1 marginal error
  double dual_tol = 1e-8;  // sup-norm change of one more dual update
  int max_iter = 10000;
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Entropically regularized transport between an n-point source cloud
/// (weights 1/n) and an m-point target cloud (weights 1/m), quadratic cost
/// |x-y|^2/2, solved by log-domain Sinkhorn with epsilon scaling. The smooth
/// dual gives an out-of-sample map and a globally smooth surrogate potential
///   phi(x) = |x|^2/2 + eps log sum_j b_j exp((g_j - |x-y_j|^2/2)/eps),
/// whose gradient is exactly the barycentric map.
class EntropicTransport {
 public:
  int dimension() const { return dim_; }
  double epsilon() const { return epsilon_; }
  bool converged() const { return converged_; }
  int iterations_run() const { return iterations_; }
  double marginal_error() const { return marginal_error_; }
  double dual_update_norm() const { return dual_update_norm_; }

  const std::vector<Vec>& source_points() const { return source_; }
  const std::vector<Vec>& target_points() const { return target_; }
  const Vec& dual_f() const { return f_; }
  const Vec& dual_g() const { return g_; }

  Vec map(std::span<const double> x) const;
  double potential(std::span<const double> x) const;
  /// phi(x+th) + phi(x-th) - 2 phi(x); pre: t > 2 sqrt(eps)
  double potential_second_quotient(std::span<const double> x,
                                   std::span<const double> h, double t) const;
  /// phi_h(x) = <map(x), h>
  double directional_derivative(std::span<const double> x,
                                std::span<const double> h) const;
  /// L1 deviation of the plan marginals from (1/n, 1/m)
  double plan_marginal_error() const;
  /// entries of the plan above `threshold`, as (i, j, weight)
  std::vector<std::tuple<int, int, double>> plan_entries(double threshold) const;
  std::string potentials_csv() const;

  friend EntropicTransport solve_entropic_points(std::vector<Vec> source,
                                                 std::vector<Vec> target,
                                                 const SolveParams& params);

 private:
  int dim_ = 0;
  double epsilon_ = 0;
  bool converged_ = false;
  int iterations_ = 0;
  double marginal_error_ = 0;
  double dual_update_norm_ = 0;
  int jobs_ = 1;
  std::vector<Vec> source_, target_;
  Vec f_, g_;
  Vec flat_target_;  // row-major target coordinates for the hot loops
};

/// Source sampled from `source`, target stratified-uniform in `body`
/// (Halton proposal + rejection).
EntropicTransport solve_entropic(const measures::Potential& source,
                                 const measures::ConvexBody& body,
                                 const SolveParams& params);

/// General smooth target: both clouds are measure samples.
EntropicTransport solve_entropic_to_measure(const measures::Potential& source,
                                            const measures::Potential& target,
                                            const SolveParams& params);

EntropicTransport solve_entropic_points(std::vector<Vec> source,
                                        std::vector<Vec> target,
                                        const SolveParams& params);

/// (t0, a): midpoint and half-width of {<y,h> : y in body}; the hyperplanes
/// <x,h> = t0 ± a support the body.
std::pair<double, double> supporting_slab(const measures::ConvexBody& body,
                                          std::span<const double> h);

struct NdHolderEstimate {
  double value = 0;
  Vec x, y;
};

/// sup |T(x)-T(y)| / |x-y|^alpha over source-sampled pairs with separation
/// >= min_sep (default 4 sqrt(eps)); deterministic given the seed.
NdHolderEstimate empirical_holder_nd(const EntropicTransport& tp, double alpha,
                                     int pair_count, std::uint64_t seed,
                                     const measures::Potential& source,
                                     double min_sep = -1);
NdHolderEstimate empirical_lipschitz_nd(const EntropicTransport& tp,
                                        int pair_count, std::uint64_t seed,
                                        const measures::Potential& source,
                                        double min_sep = -1);

}  // namespace otlab::transportnd
