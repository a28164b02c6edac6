#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otlab/density1d.hpp"
#include "otlab/numerics.hpp"

namespace otlab::measures {

enum class Norm { L2, L1, Linf };

double norm_of(std::span<const double> v, Norm n);
double dual_norm_of(std::span<const double> v, Norm n);
std::string norm_name(Norm n);

// ---------------------------------------------------------------- ConvexBody

/// Bounded convex body in dimension <= 3: axis box, Euclidean ball, or an
/// H-polytope (intersection of halfspaces <n,x> <= c). Polytopes are reduced
/// to their vertex set at construction; an unbounded system is rejected.
class ConvexBody {
 public:
  enum class Shape { Box, Ball, Polytope };

  static ConvexBody box(Vec lo, Vec hi);
  static ConvexBody ball(Vec center, double radius);
  static ConvexBody polytope(std::vector<Vec> normals, Vec offsets, int dim);

  Shape shape() const { return shape_; }
  int dimension() const { return dim_; }
  bool contains(std::span<const double> x, double tol = 1e-12) const;
  std::pair<Vec, Vec> bounding_box() const;
  double diameter() const;
  double volume() const;
  /// {min, max} of <x,h> over the body (h need not be normalized)
  std::pair<double, double> support_interval(std::span<const double> h) const;
  const std::vector<Vec>& vertices() const { return vertices_; }
  const Vec& box_lo() const { return lo_; }
  const Vec& box_hi() const { return hi_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  ConvexBody() = default;
  Shape shape_ = Shape::Box;
  int dim_ = 0;
  Vec lo_, hi_;              // box
  Vec center_;               // ball
  double radius_ = 0;        // ball
  std::vector<Vec> normals_; // polytope
  Vec offsets_;
  std::vector<Vec> vertices_;
};

// ----------------------------------------------------------------- Potential

enum class Family { Gaussian, PowerLaw, Huber1DProduct, UniformBody };

struct SampleResult {
  std::vector<Vec> points;
  double acceptance_ratio = 1.0;
};

/// Generic convex function handle used by the moduli searches; potentials and
/// ad-hoc test functions both provide one.
struct ConvexFunction {
  int dim = 1;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
};

/// A smooth 1D function with derivative; used by the derivative-form
/// Hoelder/monotonicity constant searches.
struct C1Function1D {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Log-concave probability measure e^{-V}dx. V includes the log-normalizer,
/// so exp(-value(x)) integrates to one. Families:
///   Gaussian(d, sigma):   V = |x|^2/(2 sigma^2) + d ln(sigma sqrt(2 pi))
///   PowerLaw(d, beta):    V = |x|_2^beta + ln Z  (radial)
///   Huber1DProduct(d):    V = sum V1(x_i),  V1 = x^2/2 (|x|<=1), |x|-1/2 else
///   UniformBody(K):       V = ln vol(K) on K, +inf outside
class Potential {
 public:
  static Potential gaussian(int d, double sigma = 1.0);
  static Potential power_law(int d, double beta);
  static Potential huber_product(int d);
  static Potential uniform_body(ConvexBody body);

  Family family() const { return family_; }
  int dimension() const { return dim_; }
  double log_normalizer() const { return log_norm_; }
  double sigma() const { return sigma_; }
  double beta() const { return beta_; }
  const ConvexBody* body() const { return body_ ? &*body_ : nullptr; }

  double value(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return value(x); }
  void gradient(std::span<const double> x, std::span<double> out) const;
  /// V(x+y) + V(x-y) - 2V(x); exact |y|^2/sigma^2 for the Gaussian family
  double second_quotient(std::span<const double> x, std::span<const double> y) const;

  // d = 1 only
  double cdf1(double x) const;
  double quantile1(double u) const;
  const Density1D& density1d() const;

  /// Quantile transform from the unit cube onto the measure (product and
  /// radial families; not available for UniformBody).
  Vec from_uniform(std::span<const double> u) const;
  /// Number of uniforms consumed per sample by from_uniform.
  int uniform_dim() const;

  SampleResult sample(std::size_t n, std::uint64_t seed, int jobs = 1) const;

  // family-derived moduli in the L2 norm, where known in closed form
  std::optional<double> analytic_delta(double t) const;
  std::optional<double> analytic_bregman(double t) const;

  ConvexFunction as_convex_function() const;
  C1Function1D as_c1_1d() const;  // d = 1

 private:
  Potential() = default;
  Family family_ = Family::Gaussian;
  int dim_ = 1;
  double sigma_ = 1.0;  // Gaussian
  double beta_ = 2.0;   // PowerLaw
  double log_norm_ = 0;
  std::optional<ConvexBody> body_;
  Density1DPtr density1d_;         // d=1 marginal / full density
  Density1DPtr radial_;            // PowerLaw d>=2: radial law of |x|
};

// ----------------------------------------------------------- ConvexityModulus

enum class ModulusKind { Delta, Bregman, BregmanConvexified, BregmanConjugate };
std::string modulus_kind_name(ModulusKind k);

/// Tabulated modulus of convexity. grid[0] = 0 with values[0] = 0; values are
/// nondecreasing.
struct ConvexityModulus {
  ModulusKind kind = ModulusKind::Delta;
  Norm norm = Norm::L2;
  Vec grid, values;

  double eval(double t) const;  // monotone-cubic interpolation
  /// Inverse on the strictly increasing range; beyond the grid the dominant
  /// power fitted to the last decade extrapolates (flag reported).
  Extrapolated inverse(double v) const;
  void validate() const;
};

struct SearchSpec {
  Vec box_lo, box_hi;      // x search box; default [-10,10]^d
  int grid_per_axis = 64;  // d <= 2 (3D uses a coarser default)
  int directions = 64;     // 2D direction count; 1D uses ±1; 3D axes+diagonals
  int refine_rounds = 2;
  double refine_zoom = 8.0;
  bool polish = true;
};
SearchSpec default_search(int dim);

/// delta(t) = inf { W(x+y)+W(x-y)-2W(x) : x in box, ||y|| = t }.
/// For convex W the inf over ||y|| >= t is attained at ||y|| = t.
double modulus_delta(const ConvexFunction& W, double t, Norm norm,
                     const SearchSpec& spec);
/// b(t) = inf { W(x+y)-W(x)-<grad W(x), y> : x in box, ||y|| = t }.
double modulus_bregman(const ConvexFunction& W, double t, Norm norm,
                       const SearchSpec& spec);
/// sup of the second difference at displacement length t (upper counterpart
/// used for the A_p constants of source measures).
double second_difference_sup(const ConvexFunction& V, double t, Norm norm,
                             const SearchSpec& spec);

Vec default_modulus_grid(double t_max = 8.0, int n = 64);

ConvexityModulus tabulate_modulus(ModulusKind kind, const ConvexFunction& W,
                                  Norm norm, const SearchSpec& spec,
                                  std::span<const double> grid);

/// Lower convex envelope of a tabulated Bregman modulus (maximal convex
/// function majorized by it).
ConvexityModulus convexify_modulus(const ConvexityModulus& m);
/// Discrete Legendre transform b*(t) = sup_s { ts - b(s) } on the grid.
ConvexityModulus conjugate_modulus(const ConvexityModulus& m);

// derivative-form constants for the 1D theorem
/// sup |V'(x)-V'(y)| / |x-y|^p over pairs in [lo,hi] with separation in
/// [sep_min, sep_max]
double holder_cp_sup(const C1Function1D& V, double p, double lo, double hi,
                     double sep_min = 1e-3, double sep_max = 8.0);
/// inf (x-y)(W'(x)-W'(y)) / |x-y|^{q+1} over the same pair family
double monotone_cq_inf(const C1Function1D& W, double q, double lo, double hi,
                       double sep_min = 1e-3, double sep_max = 8.0);

/// A_p / A_q style constants from the second-difference moduli over a t-grid.
double second_diff_upper_constant(const ConvexFunction& V, double p, Norm norm,
                                  const SearchSpec& spec,
                                  std::span<const double> t_grid);
double second_diff_lower_constant(const ConvexFunction& W, double q, Norm norm,
                                  const SearchSpec& spec,
                                  std::span<const double> t_grid);

std::string modulus_csv(const ConvexityModulus& m);  // columns t,value,kind,norm

}  // namespace otlab::measures
