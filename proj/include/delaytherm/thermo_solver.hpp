#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "delaytherm/core_model.hpp"
#include "delaytherm/delay_ode.hpp"
#include "delaytherm/modal_spectral.hpp"

namespace delaytherm {

/// Per-mode data after projection onto the basis: initial coefficient
/// vectors plus time-parameterized prehistory and forcing coefficients.
struct ModalData {
  std::size_t n_modes = 0;
  double tau = 0.0;
  std::vector<CVector> initial;                            // 3-vectors per mode
  std::vector<std::function<CVector(double)>> prehistory;  // per mode on [-tau, 0]
  std::vector<double> prehistory_knots;                    // shared interior knots
  std::vector<std::function<CVector(double)>> forcing;     // per mode on [0, T]
  std::vector<double> forcing_knots;
  bool forcing_is_zero = true;
};

/// Space-time samples of the reconstructed fields.
struct FieldSolution {
  std::vector<double> x_grid;
  std::vector<double> t_grid;
  // Indexed [time][position].
  std::vector<std::vector<std::array<double, 3>>> V;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> theta;
};

/// Projects one sampled 3-component field onto mode n: plain L2 inner
/// products against the basis components divided by their squared norms,
/// by 512-node composite quadrature with a doubled-resolution check.
std::array<double, 3> project_sample(const Basis& basis, std::size_t n,
                                     const std::function<std::array<double, 3>(double)>& field);

/// Component-wise Fourier coefficients of initial data, prehistory and
/// forcing. Evaluator-type prehistory is sampled on a uniform grid over
/// [-tau, 0] (prehistory_samples knots) and interpolated linearly in time.
ModalData project_data(const ProblemSpec& spec, const Basis& basis,
                       std::size_t prehistory_samples = 33);

/// Solves the delay ODE of mode n by the closed-form representation,
/// using the diagonalized delayed exponential when the mode is
/// diagonalizable and the direct series otherwise.
Trajectory solve_mode(const ModalSystem& sys, const ModalData& data,
                      std::span<const double> t_grid, double horizon);

/// Classical (tau = 0) reference trajectory of mode n via the matrix
/// exponential and the variation-of-constants integral.
Trajectory classical_mode_reference(const ModalSystem& sys, const ModalData& data,
                                    std::span<const double> t_grid);

/// Assembles V(x, t) from modal trajectories (ascending mode order,
/// compensated accumulation), reconstructs u by trapezoidal time
/// integration of the first component, and reads theta from the third.
/// The displacement at t = 0 is recovered from the second component's
/// initial coefficients by antidifferentiation with u(0) = 0.
/// Throws NumericError when assembled fields carry imaginary residues.
FieldSolution reconstruct(const ProblemSpec& spec, const Basis& basis, const ModalData& data,
                          const std::vector<Trajectory>& modal_trajectories,
                          std::span<const double> x_grid, std::span<const double> t_grid);

struct Norms {
  double x_norm = 0.0;
  double x_inf_norm = 0.0;
};

/// Weighted modal norms: x_norm is the truncated X norm of the coefficient
/// stack, x_inf_norm the strengthened norm summing (1/k!)-weighted powers
/// of the modal matrices; the series is truncated when a term drops below
/// tol times the partial sum. Overflow is reported as +inf.
Norms norms(const std::vector<CVector>& modal_values, const std::vector<ModalSystem>& systems,
            const Basis& basis, double tol = 1e-16);

struct ConvergenceReport {
  std::vector<double> taus;
  std::vector<double> sup_errors;                  // X-norm distance, max over the grid
  std::vector<std::vector<double>> per_mode;       // [tau][mode]
  std::vector<double> bounds;                      // theorem bound per tau
  std::vector<bool> bound_satisfied;
  double slope = 0.0;
  bool slope_defined = false;
};

/// Delayed-versus-classical error study over a decreasing list of delays;
/// prehistory is the constant-in-time extension of the initial state.
/// Fits the log-log slope of the sup error against tau.
ConvergenceReport convergence_study(const ProblemSpec& spec, std::span<const double> tau_list);

struct ResidualReport {
  double res1 = 0.0;
  double res2 = 0.0;
  double res3 = 0.0;
};

/// Central-difference residuals of the three field equations at interior
/// grid points, reading delayed rows from the prehistory where t - tau < 0.
/// Stencils straddling the delay-interval breakpoints (where the solution
/// loses smoothness) are skipped. Requires at least 5 interior points in
/// each direction and tau an integer multiple of dt.
ResidualReport residual_check(const FieldSolution& field, const ProblemSpec& spec,
                              const Basis& basis, const ModalData& data);

struct DependenceReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

/// Continuous-dependence inequality: the sup over time of the solution's
/// strengthened norm against e^T, tau e^T and sqrt(T) e^T weighted data
/// norms.
DependenceReport continuous_dependence_check(const std::vector<ModalSystem>& systems,
                                             const ModalData& data, const Basis& basis,
                                             const std::vector<Trajectory>& trajectories,
                                             double horizon);

/// Uniform grids.
std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

}  // namespace delaytherm
