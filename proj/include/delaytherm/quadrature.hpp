#pragma once

#include <functional>
#include <span>
#include <vector>

#include "delaytherm/linalg.hpp"

namespace delaytherm {

/// 16-node Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
  static const std::array<double, 16> nodes;
  static const std::array<double, 16> weights;
};

/// One GL16 panel of a complex-vector-valued integrand over [a, b].
CVector gl16_panel(const std::function<CVector(double)>& f, double a, double b, std::size_t dim);

struct QuadratureResult {
  CVector value;
  double error_estimate = 0.0;
};

/// Composite quadrature of f over [a, b] split at the given breakpoints,
/// each segment integrated by GL16 with bisection refinement until the
/// panel estimate (|whole - halves|) meets the tolerance.
/// Throws NumericError (with the achieved estimate) if refinement depth
/// is exhausted before the tolerance is met.
QuadratureResult integrate_breakpoints(const std::function<CVector(double)>& f, double a, double b,
                                       std::span<const double> breakpoints, std::size_t dim,
                                       double rel_tol = 1e-12, int max_depth = 10);

/// Plain composite GL16 with n_panels uniform panels (no error control).
CVector integrate_uniform(const std::function<CVector(double)>& f, double a, double b,
                          std::size_t n_panels, std::size_t dim);

/// Scalar composite GL16 with uniform panels (512 nodes = 32 panels default).
double integrate_scalar_uniform(const std::function<double(double)>& f, double a, double b,
                                std::size_t n_panels = 32);

}  // namespace delaytherm
