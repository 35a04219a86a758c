#include "delaytherm/core_model.hpp"

#include <cmath>
#include <string>

#include "delaytherm/modal_spectral.hpp"
#include "delaytherm/thermo_solver.hpp"

namespace delaytherm {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be > 0");
  }
}

}  // namespace

void PhysicalParameters::validate() const {
  require_positive(rho, "rho");
  require_positive(bulk, "bulk");
  require_positive(shear, "shear");
  require_positive(alpha, "alpha");
  require_positive(kappa, "kappa");
  require_positive(c_rho, "c_rho");
  require_positive(theta0, "theta0");
  require_positive(l, "l");
}

DerivedCoefficients derive_coefficients(const PhysicalParameters& p) {
  p.validate();
  DerivedCoefficients c;
  c.a = (p.bulk + 4.0 / 3.0 * p.shear) / p.rho;
  c.b = p.alpha * p.bulk / p.rho;
  c.c = p.kappa / (p.rho * p.c_rho);
  c.d = p.alpha * p.theta0 * p.bulk / (p.rho * p.c_rho);
  return c;
}

double resolved_dt(const ProblemSpec& spec) {
  return spec.grids.dt > 0.0 ? spec.grids.dt : spec.tau / 20.0;
}

ProblemSpec validate_problem(ProblemSpec spec) {
  spec.physical.validate();
  spec.coeffs = derive_coefficients(spec.physical);
  require_positive(spec.tau, "tau");
  require_positive(spec.horizon, "horizon");
  if (spec.n_modes < 1) throw DomainError("n_modes must be >= 1");
  if (spec.grids.dt < 0.0) throw DomainError("dt must be >= 0 (0 selects the default)");
  if (spec.grids.n_x < 7) throw DomainError("n_x must be >= 7");

  const Basis basis(spec.physical.l, spec.coeffs);

  // Boundary traces of evaluator-type data: the first component must vanish
  // at both ends, the third must have flat first differences there.
  const auto check_traces = [&](const DataSpec& d, const char* name, double t) {
    if (d.kind != DataSpec::Kind::GaussianBump && d.kind != DataSpec::Kind::Evaluator) return;
    const double l = spec.physical.l;
    const double h = l * 1e-6;
    const auto at = [&](double x) -> std::array<double, 3> {
      if (d.kind == DataSpec::Kind::GaussianBump) {
        std::array<double, 3> v{0.0, 0.0, 0.0};
        const double z = (x - d.center) / d.width;
        v[static_cast<std::size_t>(d.component)] = d.bump_amplitude * std::exp(-z * z);
        return v;
      }
      return d.evaluator(x, t);
    };
    double scale = 1.0;
    for (double x : {0.0, 0.25 * l, 0.5 * l, 0.75 * l, l}) {
      const auto v = at(x);
      for (double c : v) scale = std::max(scale, std::abs(c));
    }
    const double tol = 1e-10 * scale;
    if (std::abs(at(0.0)[0]) > tol || std::abs(at(l)[0]) > tol) {
      throw DomainError(std::string(name) + ": first component must vanish at x = 0 and x = l");
    }
    if (std::abs(at(h)[2] - at(0.0)[2]) > tol * 1e2 ||
        std::abs(at(l)[2] - at(l - h)[2]) > tol * 1e2) {
      throw DomainError(std::string(name) +
                        ": third component must have a flat trace at the endpoints");
    }
  };
  check_traces(spec.initial, "initial", 0.0);
  check_traces(spec.prehistory, "prehistory", 0.0);

  if (spec.forcing.kind == DataSpec::Kind::ConstantInitial ||
      spec.initial.kind == DataSpec::Kind::ConstantInitial) {
    throw DomainError("constant-initial is only meaningful for the prehistory");
  }
  if (spec.initial.kind == DataSpec::Kind::SingleMode && spec.initial.mode >= spec.n_modes) {
    throw DomainError("initial single_mode index beyond the retained modes");
  }
  if (spec.initial.kind == DataSpec::Kind::GaussianBump ||
      spec.prehistory.kind == DataSpec::Kind::GaussianBump ||
      spec.forcing.kind == DataSpec::Kind::GaussianBump) {
    const auto check_bump = [&](const DataSpec& d) {
      if (d.kind != DataSpec::Kind::GaussianBump) return;
      require_positive(d.width, "gaussian width");
      if (d.component < 0 || d.component > 2) throw DomainError("gaussian component must be 1..3");
      if (d.center < 0.0 || d.center > spec.physical.l) {
        throw DomainError("gaussian center must lie in [0, l]");
      }
    };
    check_bump(spec.initial);
    check_bump(spec.prehistory);
    check_bump(spec.forcing);
  }

  // Compatibility of prehistory with the initial state at t = 0, measured
  // in the X norm of the truncation.
  const ModalData data = project_data(spec, basis);
  double mismatch_sq = 0.0;
  for (std::size_t n = 0; n < spec.n_modes; ++n) {
    const CVector at0 = data.prehistory[n](0.0);
    const auto w = basis.mode_weights(n);
    for (std::size_t k = 0; k < 3; ++k) {
      mismatch_sq += w[k] * std::norm(at0[k] - data.initial[n][k]);
    }
  }
  const double mismatch = std::sqrt(mismatch_sq);
  if (mismatch > 1e-12) {
    throw DomainError("prehistory at t = 0 does not match the initial state: X-norm mismatch " +
                      std::to_string(mismatch));
  }
  return spec;
}

}  // namespace delaytherm
