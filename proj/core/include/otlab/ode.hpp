#pragma once

#include <array>
#include <functional>
#include <vector>

namespace otlab {

/// Dormand-Prince 5(4) for two-state systems, adaptive steps, FSAL.
/// Accepted steps are recorded; values between nodes come from cubic Hermite
/// interpolation of (y, y') which is well below the step tolerance here.
class Dopri5 {
 public:
  using State = std::array<double, 2>;
  using Rhs = std::function<State(double, const State&)>;

  Dopri5(Rhs rhs, double rel_tol = 1e-12, double abs_tol = 1e-14);

  struct Node {
    double t;
    State y;
    State dy;
  };

  /// Integrate from (t0, y0) while `keep_going(y)` holds and t < t_max.
  /// Returns the recorded trajectory. On the step where keep_going flips, the
  /// step is shortened by bisection (re-stepping from the last accepted node)
  /// so that the final node sits on the boundary within t_tol.
  std::vector<Node> integrate_until(double t0, const State& y0, double t_max,
                                    const std::function<bool(const State&)>& keep_going,
                                    double t_tol = 1e-13);

  /// Evaluate a recorded trajectory at t (Hermite between nodes).
  static State sample(const std::vector<Node>& traj, double t);

 private:
  bool step(double t, const State& y, const State& dy, double h, State& y_out,
            State& dy_out, double& err) const;
  Rhs rhs_;
  double rel_tol_, abs_tol_;
};

}  // namespace otlab
