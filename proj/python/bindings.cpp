#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delaytherm/config.hpp"
#include "delaytherm/delay_ode.hpp"
#include "delaytherm/delayed_exp.hpp"
#include "delaytherm/errors.hpp"
#include "delaytherm/run.hpp"
#include "delaytherm/thermo_solver.hpp"
#include "delaytherm/validation.hpp"

namespace py = pybind11;
using namespace delaytherm;

namespace {

CMatrix to_matrix(const std::vector<std::vector<Complex>>& rows) {
  const std::size_t n = rows.size();
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw InputError("matrix rows must form a square matrix");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<Complex>> from_matrix(const CMatrix& m) {
  std::vector<std::vector<Complex>> rows(m.rows(), std::vector<Complex>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  }
  return rows;
}

DerivedCoefficients coeffs_from_dict(const py::dict& d) {
  DerivedCoefficients c;
  c.a = d["a"].cast<double>();
  c.b = d["b"].cast<double>();
  c.c = d["c"].cast<double>();
  c.d = d["d"].cast<double>();
  return c;
}

py::dict solve_ivp_py(const std::vector<std::vector<Complex>>& m, double tau,
                      const std::vector<Complex>& x0, py::object prehistory, py::object forcing,
                      double horizon, const std::vector<double>& t_grid, const std::string& method,
                      double step) {
  DelayIVP ivp;
  ivp.M = to_matrix(m);
  ivp.tau = tau;
  ivp.x0 = x0;
  if (py::isinstance<py::function>(prehistory)) {
    auto fn = prehistory.cast<py::function>();
    ivp.prehistory = [fn](double s) { return fn(s).cast<CVector>(); };
  } else {
    const CVector constant = prehistory.cast<CVector>();
    ivp.prehistory = [constant](double) { return constant; };
  }
  if (forcing.is_none()) {
    ivp.forcing_is_zero = true;
  } else {
    auto fn = forcing.cast<py::function>();
    ivp.forcing = [fn](double t) { return fn(t).cast<CVector>(); };
  }
  ivp.horizon = horizon;

  Trajectory tr;
  if (method == "closed_form") {
    tr = solve_closed_form(ivp, t_grid);
  } else if (method == "steps") {
    tr = solve_method_of_steps(ivp, t_grid, step > 0.0 ? step : tau / 200.0);
  } else {
    throw DomainError("method must be 'closed_form' or 'steps'");
  }
  py::dict out;
  out["times"] = tr.times;
  out["states"] = tr.states;
  out["solver"] = tr.solver;
  return out;
}

py::dict simulate_arrays(const std::string& config_json) {
  const ParsedConfig parsed = parse_config(config_json);
  const ProblemSpec spec = finalize_spec(parsed, RunConfig{});
  const Basis basis(spec.physical.l, spec.coeffs);
  const ModalData data = project_data(spec, basis);
  std::vector<ModalSystem> systems;
  std::vector<Trajectory> trajectories;
  const double dt = resolved_dt(spec);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(spec.horizon / dt - 1e-9));
  const std::vector<double> t_grid = uniform_grid(0.0, spec.horizon, steps + 1);
  const std::vector<double> x_grid = uniform_grid(0.0, spec.physical.l, spec.grids.n_x);
  for (std::size_t n = 0; n < spec.n_modes; ++n) {
    systems.push_back(build_modal_system(n, spec.coeffs, spec.physical.l));
    trajectories.push_back(solve_mode(systems[n], data, t_grid, spec.horizon));
  }
  const FieldSolution field = reconstruct(spec, basis, data, trajectories, x_grid, t_grid);
  py::dict out;
  out["t"] = field.t_grid;
  out["x"] = field.x_grid;
  out["V"] = field.V;
  out["u"] = field.u;
  out["theta"] = field.theta;
  return out;
}

py::dict converge_py(const std::string& config_json, const std::vector<double>& tau_list) {
  const ParsedConfig parsed = parse_config(config_json);
  const ProblemSpec spec = finalize_spec(parsed, RunConfig{});
  const ConvergenceReport rep = convergence_study(spec, tau_list);
  py::dict out;
  out["taus"] = rep.taus;
  out["sup_errors"] = rep.sup_errors;
  out["bounds"] = rep.bounds;
  out["bound_satisfied"] = rep.bound_satisfied;
  out["slope"] = rep.slope;
  out["slope_defined"] = rep.slope_defined;
  return out;
}

py::list validate_py(std::uint64_t seed) {
  py::list out;
  for (const auto& r : run_validation_suite(seed)) {
    py::dict item;
    item["name"] = r.name;
    item["passed"] = r.passed;
    item["detail"] = r.detail;
    out.append(item);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_delaytherm, m) {
  m.doc() = "Spectral solver for 1D thermoelasticity with a pure constant delay";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DomainError>(m, "DomainError");
  py::register_exception<NumericError>(m, "NumericError");
  py::register_exception<InputError>(m, "InputError");

  m.def(
      "derive_coefficients",
      [](double rho, double bulk, double shear, double alpha, double kappa, double c_rho,
         double theta0, double l) {
        PhysicalParameters p{rho, bulk, shear, alpha, kappa, c_rho, theta0, l};
        const DerivedCoefficients c = derive_coefficients(p);
        py::dict out;
        out["a"] = c.a;
        out["b"] = c.b;
        out["c"] = c.c;
        out["d"] = c.d;
        return out;
      },
      py::arg("rho"), py::arg("bulk"), py::arg("shear"), py::arg("alpha"), py::arg("kappa"),
      py::arg("c_rho"), py::arg("theta0"), py::arg("l"),
      "Reduced coefficients (a, b, c, d) of the first-order system");

  m.def("delayed_exp_scalar", &delayed_exp_scalar, py::arg("lam"), py::arg("tau"), py::arg("t"));
  m.def(
      "delayed_exp_matrix",
      [](const std::vector<std::vector<Complex>>& mat, double tau, double t) {
        return from_matrix(delayed_exp_matrix_direct(to_matrix(mat), tau, t));
      },
      py::arg("m"), py::arg("tau"), py::arg("t"));
  m.def(
      "classical_exp_matrix",
      [](const std::vector<std::vector<Complex>>& mat, double t) {
        return from_matrix(classical_exp_matrix(to_matrix(mat), t));
      },
      py::arg("m"), py::arg("t"));

  m.def("solve_delay_ivp", &solve_ivp_py, py::arg("m"), py::arg("tau"), py::arg("x0"),
        py::arg("prehistory"), py::arg("forcing"), py::arg("horizon"), py::arg("t_grid"),
        py::arg("method") = "closed_form", py::arg("step") = 0.0,
        "Solve x'(t) + M x(t - tau) = f(t) by the closed form or the "
        "method-of-steps oracle");

  m.def("wavenumber", &wavenumber, py::arg("n"), py::arg("l"));
  m.def(
      "modal_matrix",
      [](std::size_t n, const py::dict& coeffs, double l) {
        return from_matrix(modal_matrix(n, coeffs_from_dict(coeffs), l));
      },
      py::arg("n"), py::arg("coeffs"), py::arg("l"));
  m.def(
      "cubic_eigenvalues",
      [](std::size_t n, const py::dict& coeffs, double l) {
        const auto mu = cubic_eigenvalues(n, coeffs_from_dict(coeffs), l);
        return std::vector<Complex>{mu[0], mu[1], mu[2]};
      },
      py::arg("n"), py::arg("coeffs"), py::arg("l"));
  m.def(
      "companion_roots",
      [](Complex c2, Complex c1, Complex c0) {
        const auto mu = companion_roots_oracle(c2, c1, c0);
        return std::vector<Complex>{mu[0], mu[1], mu[2]};
      },
      py::arg("c2"), py::arg("c1"), py::arg("c0"),
      "Roots of mu^3 + c2 mu^2 + c1 mu + c0 via the companion matrix");
  m.def(
      "eigenvector",
      [](Complex mu, std::size_t n, const py::dict& coeffs, double l) {
        return eigenvector(mu, n, coeffs_from_dict(coeffs), l);
      },
      py::arg("mu"), py::arg("n"), py::arg("coeffs"), py::arg("l"));

  m.def("simulate_arrays", &simulate_arrays, py::arg("config_json"),
        "Solve the configured problem and return the sampled fields in memory");
  m.def("converge", &converge_py, py::arg("config_json"), py::arg("tau_list"));
  m.def("validate", &validate_py, py::arg("seed") = 0);
  m.def(
      "run_cli",
      [](const std::string& command, const std::string& config_json, const std::string& output_dir,
         bool parallel, const std::string& format) {
        RunConfig cfg;
        if (command == "simulate") {
          cfg.command = RunConfig::Command::Simulate;
        } else if (command == "modes") {
          cfg.command = RunConfig::Command::Modes;
        } else if (command == "converge") {
          cfg.command = RunConfig::Command::Converge;
        } else if (command == "validate") {
          cfg.command = RunConfig::Command::Validate;
        } else {
          throw DomainError("unknown command: " + command);
        }
        cfg.output_dir = output_dir;
        cfg.parallel = parallel;
        cfg.format = format;
        return run_with_config_text(cfg, config_json);
      },
      py::arg("command"), py::arg("config_json"), py::arg("output_dir"),
      py::arg("parallel") = false, py::arg("format") = "csv",
      "Run one CLI command with the given config text; returns the exit code");
}
