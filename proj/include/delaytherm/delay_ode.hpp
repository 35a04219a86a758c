#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delaytherm/delayed_exp.hpp"
#include "delaytherm/linalg.hpp"

namespace delaytherm {

/// Linear pure-delay Cauchy problem in the canonical form
///   x'(t) + M x(t - tau) = f(t),  x(0) = x0,  x = prehistory on [-tau, 0).
struct DelayIVP {
  CMatrix M;
  double tau = 0.0;
  CVector x0;
  std::function<CVector(double)> prehistory;   // defined on [-tau, 0]
  std::vector<double> prehistory_knots;        // interpolation knots in (-tau, 0), if any
  std::function<CVector(double)> forcing;      // defined on [0, horizon]
  std::vector<double> forcing_knots;
  bool forcing_is_zero = false;
  double horizon = 0.0;

  std::size_t dim() const { return M.rows(); }
  void check() const;  // shape and range checks, throws on violation
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CVector> states;
  std::string solver;
  int quadrature_order = 0;
};

/// Evaluator of t -> exp_tau(-M, t); either the direct series or the
/// diagonalized shortcut S exp_tau(-D, t) S^-1.
using ExpTauFn = std::function<CMatrix(double)>;

/// Closed-form solution
///   x(t) = exp_tau(-M, t - tau) x0
///        - M  int_{-tau}^{0} exp_tau(-M, t - 2 tau - s) prehistory(s) ds
///        +    int_{0}^{t}    exp_tau(-M, t - tau - s) f(s) ds
/// with breakpoint-aware composite Gauss-Legendre quadrature. Prehistory
/// contributions whose delayed-exponential argument falls below -tau are
/// skipped analytically. For grid times in [-tau, 0) the prehistory is
/// returned; at 0 the initial state.
Trajectory solve_closed_form(const DelayIVP& ivp, std::span<const double> t_grid,
                             const ExpTauFn* exp_tau_override = nullptr);

/// Method-of-steps oracle: classical RK4 within each delay interval, the
/// delayed term read from cubic Hermite interpolation of the stored
/// solution. Requires step <= tau / 50.
Trajectory solve_method_of_steps(const DelayIVP& ivp, std::span<const double> t_grid, double step);

/// Sup over the shared grid of the Euclidean distance of states.
/// Throws InputError when the grids differ.
double trajectory_distance(const Trajectory& a, const Trajectory& b);

}  // namespace delaytherm
