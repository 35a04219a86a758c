#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "delaytherm/errors.hpp"

namespace delaytherm {

/// Material constants and interval length. All strictly positive.
struct PhysicalParameters {
  double rho = 1.0;     // mass density
  double bulk = 1.0;    // bulk modulus
  double shear = 0.75;  // shear modulus
  double alpha = 1.0;   // thermal expansion coefficient
  double kappa = 1.0;   // thermal conductivity
  double c_rho = 1.0;   // specific heat capacity
  double theta0 = 1.0;  // reference temperature
  double l = 1.0;       // interval length

  /// Throws DomainError naming the offending field.
  void validate() const;
};

/// Reduced coefficients of the first-order system.
struct DerivedCoefficients {
  double a = 0.0;  // (bulk + 4/3 shear) / rho
  double b = 0.0;  // alpha bulk / rho
  double c = 0.0;  // kappa / (rho c_rho)
  double d = 0.0;  // alpha theta0 bulk / (rho c_rho)
};

DerivedCoefficients derive_coefficients(const PhysicalParameters& p);

/// Description of one data entry (initial state, prehistory, or forcing).
/// The three components follow the state vector (time-derivative of the
/// displacement, its space derivative, temperature).
struct DataSpec {
  enum class Kind {
    Zero,
    ConstantInitial,  // prehistory only: constant-in-time extension of the initial state
    SingleMode,       // amplitude-scaled normalized basis mode
    GaussianBump,     // bump on one component
    Modal,            // explicit per-mode coefficient rows, n = 0, 1, ...
    Evaluator         // caller-supplied closed form (x, t) -> 3 components
  };

  Kind kind = Kind::Zero;

  // SingleMode
  std::size_t mode = 0;
  std::array<double, 3> amplitude{0.0, 0.0, 0.0};

  // GaussianBump
  double center = 0.0;
  double width = 1.0;
  double bump_amplitude = 0.0;
  int component = 2;  // 0-based component index

  // Modal
  std::vector<std::array<double, 3>> modal;

  // Evaluator (t is ignored for initial data)
  std::function<std::array<double, 3>(double x, double t)> evaluator;
};

/// Space/time sampling controls. dt == 0 selects the default tau/20.
struct GridSpec {
  std::size_t n_x = 257;
  double dt = 0.0;
};

struct ProblemSpec {
  PhysicalParameters physical{};
  DerivedCoefficients coeffs{};
  double tau = 0.0;
  double horizon = 0.0;
  std::size_t n_modes = 32;
  DataSpec initial;
  DataSpec prehistory;
  DataSpec forcing;
  GridSpec grids;
};

/// Full invariant check: positive parameters, admissible ranges, boundary
/// traces of evaluator data, and compatibility of the prehistory at t = 0
/// with the initial state (measured in the X norm of the modal truncation,
/// tolerance 1e-12). Returns the checked spec with derived coefficients
/// filled in; throws DomainError / InputError otherwise.
ProblemSpec validate_problem(ProblemSpec spec);

/// Resolved time step (dt default tau/20).
double resolved_dt(const ProblemSpec& spec);

}  // namespace delaytherm
