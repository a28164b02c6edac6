#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace otlab {

inline constexpr double kPi = 3.14159265358979323846;

using Vec = std::vector<double>;
using Fn1D = std::function<double(double)>;

// ---------------- quadrature ----------------

/// Adaptive Simpson on [a,b]; tolerances are relative to the running estimate
/// with an absolute floor.
double adaptive_simpson(const Fn1D& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 1e-14,
                        int max_depth = 60);

/// As above but with mandatory subdivision points (density kinks etc.).
double adaptive_simpson_split(const Fn1D& f, double a, double b,
                              std::span<const double> breaks,
                              double rel_tol = 1e-10, double abs_tol = 1e-14);

/// Fixed-order Gauss-Legendre on [a,b]; n in {8,16,32,64}.
double gauss_legendre(const Fn1D& f, double a, double b, int n);

// ---------------- root finding / optimization ----------------

double bisect(const Fn1D& f, double lo, double hi, double x_tol,
              int max_iter = 200);
double brent_root(const Fn1D& f, double lo, double hi, double x_tol = 1e-14,
                  int max_iter = 200);
/// Maximum of a unimodal function by golden-section search.
double golden_max(const Fn1D& f, double lo, double hi, double x_tol = 1e-11);

/// Deterministic compass (pattern) search; polishes a local minimum.
Vec compass_minimize(const std::function<double(std::span<const double>)>& f,
                     Vec x0, double step0, double step_tol, int max_iter = 2000);

// ---------------- monotone piecewise cubic (Fritsch-Carlson) ----------------

class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(Vec x, Vec y);
  /// Hermite interpolant with caller-supplied node slopes (clipped into the
  /// monotonicity region).
  MonotoneCubic(Vec x, Vec y, Vec slopes);
  double operator()(double x) const;
  double derivative(double x) const;
  const Vec& nodes() const { return x_; }
  const Vec& values() const { return y_; }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t locate(double x) const;
  Vec x_, y_, m_;
};

// ---------------- special functions ----------------

double normal_cdf(double x);
double normal_quantile(double p);  // Wichura's AS241, ~1e-15 accuracy
/// \int_z^\infty e^{-s^2/2} ds (unnormalized Gaussian upper tail)
double gaussian_upper_tail(double z);

// ---------------- deterministic reductions ----------------

/// Pairwise (block-tree) summation with a fixed tree shape: the result does
/// not depend on how work was split across threads.
double pairwise_sum(std::span<const double> v);

// ---------------- misc ----------------

struct Extrapolated {
  double value = 0;
  bool extrapolated = false;
};

std::uint64_t fnv1a64(std::string_view s);
std::string to_hex16(std::uint64_t v);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Deterministic parallel loop: [0,n) is cut into fixed-size blocks that are
/// distributed over at most `jobs` threads. Block boundaries do not depend on
/// the thread count, so index-addressed writes are reproducible.
void parallel_blocks(std::size_t n, int jobs,
                     const std::function<void(std::size_t, std::size_t)>& body,
                     std::size_t block = 1024);

}  // namespace otlab
