#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otlab/envelope.hpp"
#include "otlab/measures.hpp"
#include "otlab/transport_nd.hpp"

namespace otlab::verify {

struct Witness {
  Vec x, y, h;
  double t = 0;
  std::string note;
};

/// One executable bound check: theoretical value, empirical value, slack, and
/// the witness that attains the empirical value.
/// passed <=> empirical <= theoretical * slack + abs_tol.
struct VerificationReport {
  std::string check_id;
  std::string anchor;  // serialized under the "paper_anchor" key
  double theoretical = 0;
  double empirical = 0;
  double slack = 1.0;
  double abs_tol = 0;
  bool passed = false;
  bool vacuous = false;
  bool inconclusive = false;
  Witness witness;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string notes;
};

/// Applies the pass rule and returns the result.
bool finalize(VerificationReport& r);

std::string to_json(const VerificationReport& r);
std::string to_json(std::span<const VerificationReport> rs);
std::string summary_table(std::span<const VerificationReport> rs);
bool all_passed(std::span<const VerificationReport> rs);

// ---------------------------------------------------------------- utilities

struct SupSpec {
  int n_samples = 4096;
  int rounds = 3;
  double zoom = 8.0;
};

struct BoxSupResult {
  double value = 0;
  Vec arg;
};

/// Deterministic stratified supremum over a box with local refinement around
/// the running incumbent (the evaluated set only ever grows, so the result is
/// monotone in n_samples at rounds = 0).
BoxSupResult sup_search_box(
    const std::function<double(std::span<const double>)>& obj, Vec lo, Vec hi,
    const SupSpec& spec, std::uint64_t seed);

// ------------------------------------------------------------------- checks

/// delta_2 phi(x; h, t) supplied by the caller
using QuotientFn =
    std::function<double(std::span<const double>, std::span<const double>, double)>;
using VecMapFn = std::function<Vec(std::span<const double>)>;

struct QuotientSupSpec {
  int x_udim = 1;  // uniforms consumed by x_from_uniform
  std::function<Vec(std::span<const double>)> x_from_uniform;
  int h_dim = 1;  // 1: h fixed to +1; 2/3: sphere angles searched
  double t_min = 1e-3;
  double t_max = 4.0;
  SupSpec sup;
  double u_pad = 1e-6;
};

enum class BoundForm { General, SharperRemark };

/// sup over (x,h,t) of delta_2 phi / bound(t) with
///   General:       bound = 2 (A_p/A_q)^{1/(q+1)} t^{1+alpha}
///   SharperRemark: bound = (A_p/A_q)^{1/2} t^2   (p = q = 1)
/// reported as an empirical/theoretical ratio against 1.
VerificationReport check_theorem_hoelder(double A_p, double p, double A_q,
                                         double q, const QuotientFn& quotient,
                                         const QuotientSupSpec& spec,
                                         std::uint64_t seed, double slack,
                                         double abs_tol, std::string_view check_id,
                                         std::string_view config_digest,
                                         BoundForm form = BoundForm::General);

struct PairSampler {
  int udim = 2;
  std::function<std::pair<Vec, Vec>(std::span<const double>)> pair_from_uniform;
};

/// empirical Hoelder ratio sup |T(x)-T(y)|/|x-y|^alpha versus the constant C
VerificationReport check_gradient_holder(const VecMapFn& map_fn, double alpha,
                                         double C, const PairSampler& pairs,
                                         const SupSpec& spec, std::uint64_t seed,
                                         double slack, double abs_tol,
                                         std::string_view check_id,
                                         std::string_view config_digest);

/// |grad f(x+th) - grad f(x)| <= (2/t) sup_{|v|=1} (f(x+2tv)+f(x-2tv)-2f(x)),
/// the right side sampled over `direction_count` unit directions.
VerificationReport sodin_bound_check(const measures::ConvexFunction& f,
                                     const Vec& x, double t, const Vec& h,
                                     int direction_count, double slack,
                                     std::string_view check_id,
                                     std::string_view config_digest);

/// sup |T(x)-T(y)| / (8 delta^{-1}(4 |x-y|^2)) <= 1 (ratio against 1);
/// out-of-grid inverse queries extrapolate by the fitted dominant power and
/// are noted in the report.
VerificationReport ms_modulus_bound_check(const VecMapFn& map_fn,
                                          const measures::ConvexityModulus& delta,
                                          const PairSampler& pairs,
                                          const SupSpec& spec, std::uint64_t seed,
                                          double slack, double abs_tol,
                                          std::string_view check_id,
                                          std::string_view config_digest);

/// phi_hh(x) (finite difference at scale t_fd) <= coeff * f_{p,a}(phi_h - t0)
/// pointwise at the given sample points, with (t0, a) from the supporting slab
/// and coeff = sqrt(Lambda) or sqrt(Lambda + M^2/(4(1+p))).
VerificationReport second_order_envelope_check(
    const transportnd::EntropicTransport& tp, const measures::ConvexBody& body,
    const Vec& h, double Lambda, std::optional<double> M, double p_choice,
    std::span<const Vec> points, double t_fd, double slack, double abs_tol,
    std::string_view check_id, std::string_view config_digest);

}  // namespace otlab::verify
