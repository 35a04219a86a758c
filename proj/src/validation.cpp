#include "delaytherm/validation.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "delaytherm/delay_ode.hpp"
#include "delaytherm/delayed_exp.hpp"
#include "delaytherm/errors.hpp"
#include "delaytherm/modal_spectral.hpp"
#include "delaytherm/quadrature.hpp"
#include "delaytherm/rng.hpp"
#include "delaytherm/thermo_solver.hpp"

namespace delaytherm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult delayed_exp_definition_check() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  worst = std::max(worst, std::abs(delayed_exp_scalar({5.0, 0.0}, 1.0, -2.0)));
  worst = std::max(worst, std::abs(delayed_exp_scalar({1.0, 0.0}, 1.0, -0.5) - 1.0));
  worst = std::max(worst, std::abs(delayed_exp_scalar({1.0, 0.0}, 1.0, 1.0) - 2.0));
  worst = std::max(worst, std::abs(delayed_exp_scalar({1.0, 0.0}, 1.0, 2.0) - 3.5));
  const double elapsed = seconds_since(t0);
  CheckResult r;
  r.name = "delayed_exp_definition";
  r.passed = worst <= 1e-14 && elapsed < 1.0;
  r.detail = "max deviation " + fmt(worst) + ", within the 1 s budget";
  return r;
}

CheckResult derivative_identity_check(Rng& rng) {
  const double h = 1e-5;
  double worst = 0.0;
  int points = 0;
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix m = rng.matrix(3, 1.0);
    const double norm = frobenius_norm(m);
    if (norm > 2.0) m *= Complex{2.0 / norm, 0.0};
    const double tau = rng.uniform(0.3, 1.0);
    DelayedExpEvaluator ev(m, tau);
    int taken = 0;
    while (taken < 50) {
      const double t = rng.uniform(0.05, 4.0);
      const double frac = t / tau - std::floor(t / tau);
      if (std::min(frac, 1.0 - frac) * tau < 10.0 * h) continue;
      CMatrix diff = ev(t + h) - ev(t - h);
      diff *= Complex{1.0 / (2.0 * h), 0.0};
      const CMatrix rhs = m * ev(t - tau);
      worst = std::max(worst,
                       frobenius_norm(diff - rhs) / std::max(1.0, frobenius_norm(rhs)));
      ++taken;
      ++points;
    }
  }
  CheckResult r;
  r.name = "derivative_identity";
  r.passed = worst <= 1e-6 && points == 20 * 50;
  r.detail = "max relative error " + fmt(worst) + " over " + std::to_string(points) + " points";
  return r;
}

CheckResult similarity_invariance_check(Rng& rng) {
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const CMatrix m = rng.matrix(3, 1.0, true);
    CMatrix s = rng.matrix(3, 1.0, true);
    s += Complex{1.5, 0.0} * CMatrix::identity(3);
    const CMatrix s_inv = gauss_inverse(s);
    const double kappa = condition_estimate(s, s_inv);
    const CMatrix conj = s * m * s_inv;
    const double tau = rng.uniform(0.3, 0.9);
    for (double t : {0.35, 1.1, 2.6, 3.9}) {
      const CMatrix lhs = s * delayed_exp_matrix_direct(m, tau, t) * s_inv;
      const CMatrix rhs = delayed_exp_matrix_direct(conj, tau, t);
      const double gap = frobenius_norm(lhs - rhs);
      const double allowed = 1e-11 * kappa * std::max(1.0, frobenius_norm(rhs));
      worst_ratio = std::max(worst_ratio, gap / allowed);
    }
  }
  CheckResult r;
  r.name = "similarity_invariance";
  r.passed = worst_ratio <= 1.0;
  r.detail = "worst gap at " + fmt(worst_ratio * 100.0) + "% of the allowance";
  return r;
}

CheckResult oracle_equivalence_check(Rng& rng) {
  const auto t0 = Clock::now();
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = trial % 2 == 0 ? 1 : 3;
    DelayIVP ivp;
    ivp.M = rng.matrix(dim, 1.0);
    ivp.tau = rng.uniform(0.1, 1.0);
    ivp.x0 = rng.vector(dim, 1.0);
    const CVector base = ivp.x0;
    const CVector amp = rng.vector(dim, 1.0);
    const double omega = rng.uniform(0.5, 2.5);
    ivp.prehistory = [base, amp, omega](double s) {
      CVector v = base;
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += amp[i] * std::sin(omega * s);
      return v;
    };
    const CVector famp = rng.vector(dim, 1.0);
    ivp.forcing = [famp, omega](double t) {
      CVector v = famp;
      for (auto& x : v) x *= std::cos(omega * t);
      return v;
    };
    ivp.forcing_is_zero = false;
    ivp.horizon = 5.0 * ivp.tau;
    const std::vector<double> grid = uniform_grid(0.0, ivp.horizon, 26);
    const Trajectory cf = solve_closed_form(ivp, grid);
    const Trajectory ms = solve_method_of_steps(ivp, grid, ivp.tau / 200.0);
    double max_state = 0.0;
    for (const auto& s : cf.states) max_state = std::max(max_state, vector_norm(s));
    worst_ratio = std::max(worst_ratio,
                           trajectory_distance(cf, ms) / (1e-7 * (1.0 + max_state)));
  }
  const double elapsed = seconds_since(t0);
  CheckResult r;
  r.name = "closed_form_vs_method_of_steps";
  r.passed = worst_ratio <= 1.0 && elapsed < 30.0;
  r.detail = "worst distance at " + fmt(worst_ratio * 100.0) + "% of the allowance, within the 30 s budget";
  return r;
}

CheckResult eigenvalue_formula_check(Rng& rng) {
  const double l = std::numbers::pi;
  double worst_gap = 0.0;
  double worst_sym = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    DerivedCoefficients c;
    c.a = rng.uniform(0.1, 3.0);
    c.b = rng.uniform(0.1, 3.0);
    c.c = rng.uniform(0.1, 3.0);
    c.d = rng.uniform(0.1, 3.0);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(0.0, 15.999));
    const double nu2 = wavenumber(n, l) * wavenumber(n, l);
    const auto closed = cubic_eigenvalues(n, c, l);
    const auto oracle = companion_roots_oracle({-c.c * nu2, 0.0}, {(c.a + c.b * c.d) * nu2, 0.0},
                                               {-c.a * c.c * nu2 * nu2, 0.0});
    std::array<bool, 3> used{false, false, false};
    for (const auto& x : closed) {
      double best = 1e300;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < 3; ++j) {
        if (!used[j] && std::abs(x - oracle[j]) < best) {
          best = std::abs(x - oracle[j]);
          arg = j;
        }
      }
      used[arg] = true;
      worst_gap = std::max(worst_gap, best);
    }
    const Complex sum = closed[0] + closed[1] + closed[2];
    const Complex pair = closed[0] * closed[1] + closed[0] * closed[2] + closed[1] * closed[2];
    const Complex prod = closed[0] * closed[1] * closed[2];
    worst_sym = std::max(worst_sym,
                         std::abs(sum - c.c * nu2) / std::max(1.0, std::abs(sum)));
    worst_sym = std::max(worst_sym, std::abs(pair - (c.a + c.b * c.d) * nu2) /
                                        std::max(1.0, std::abs(pair)));
    worst_sym = std::max(worst_sym, std::abs(prod - c.a * c.c * nu2 * nu2) /
                                        std::max(1.0, std::abs(prod)));
  }
  CheckResult r;
  r.name = "cubic_eigenvalue_formula";
  r.passed = worst_gap <= 1e-9 && worst_sym <= 1e-10;
  r.detail = "oracle gap " + fmt(worst_gap) + ", symmetric-function error " + fmt(worst_sym);
  return r;
}

CheckResult eigenvector_residual_check(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    DerivedCoefficients c;
    c.a = rng.uniform(0.1, 3.0);
    c.b = rng.uniform(0.1, 3.0);
    c.c = rng.uniform(0.1, 3.0);
    c.d = rng.uniform(0.1, 3.0);
    const double l = rng.uniform(0.5, 4.0);
    for (std::size_t n = 1; n <= 32; ++n) {
      const CMatrix b = modal_matrix(n, c, l);
      for (const auto& mu : cubic_eigenvalues(n, c, l)) {
        const CVector v = eigenvector(mu, n, c, l);
        CVector resid = b * v;
        for (std::size_t i = 0; i < 3; ++i) resid[i] = mu * v[i] - resid[i];
        worst = std::max(worst, vector_norm(resid) / (frobenius_norm(b) * vector_norm(v)));
      }
    }
  }
  // Degenerate closed form: b -> 0 forces the null-space fallback.
  DerivedCoefficients deg;
  deg.a = 1.0;
  deg.b = 0.0;
  deg.c = 1.0;
  deg.d = 1.0;
  const CMatrix b1 = modal_matrix(1, deg, std::numbers::pi);
  const CVector v = eigenvector({0.0, 1.0}, 1, deg, std::numbers::pi);
  CVector resid = b1 * v;
  for (std::size_t i = 0; i < 3; ++i) resid[i] = Complex{0.0, 1.0} * v[i] - resid[i];
  worst = std::max(worst, vector_norm(resid) / frobenius_norm(b1));

  CheckResult r;
  r.name = "eigenvector_residuals";
  r.passed = worst <= 1e-10;
  r.detail = "worst scaled residual " + fmt(worst);
  return r;
}

CheckResult exp_comparison_check(Rng& rng) {
  double worst_gap_ratio = 0.0;
  double worst_step_ratio = 0.0;
  const double horizon = 2.0;
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix m = rng.matrix(3, 1.0);
    const double norm = frobenius_norm(m);
    m *= Complex{rng.uniform(0.3, 1.0) / std::max(norm, 1e-12), 0.0};
    for (double tau : {0.5, 0.2, 0.1}) {
      const std::vector<double> grid = uniform_grid(0.0, horizon, 81);
      const auto rep = exp_comparison_report(m, tau, horizon, grid);
      worst_gap_ratio = std::max(worst_gap_ratio, rep.max_gap / rep.bound);
      worst_step_ratio = std::max(worst_step_ratio, rep.max_step_ratio);
    }
  }
  CheckResult r;
  r.name = "delayed_vs_classical_exp_bound";
  r.passed = worst_gap_ratio <= 1.0 && worst_step_ratio <= 1.0 + 1e-12;
  r.detail = "gap at " + fmt(worst_gap_ratio * 100.0) + "% of tau*e^T, step increments at " +
             fmt(worst_step_ratio * 100.0) + "% of tau^{k+1}/(k+1)!";
  return r;
}

CheckResult small_delay_convergence_check() {
  ProblemSpec spec;
  spec.physical = PhysicalParameters{};
  spec.physical.l = std::numbers::pi;
  spec.coeffs = DerivedCoefficients{1.0, 1.0, 1.0, 1.0};
  spec.tau = 0.2;
  spec.horizon = 1.0;
  spec.n_modes = 2;
  spec.initial.kind = DataSpec::Kind::SingleMode;
  spec.initial.mode = 1;
  spec.initial.amplitude = {1.0, 1.0, 1.0};
  spec.prehistory.kind = DataSpec::Kind::ConstantInitial;
  spec.forcing.kind = DataSpec::Kind::Zero;
  const std::vector<double> taus{0.2, 0.1, 0.05, 0.025};
  const ConvergenceReport rep = convergence_study(spec, taus);
  bool bounds_ok = true;
  for (bool ok : rep.bound_satisfied) bounds_ok = bounds_ok && ok;
  CheckResult r;
  r.name = "small_delay_convergence";
  r.passed = rep.slope_defined && rep.slope >= 0.85 && rep.slope <= 1.15 && bounds_ok;
  r.detail = "slope " + fmt(rep.slope) + (bounds_ok ? ", bound holds at every tau"
                                                    : ", bound violated");
  return r;
}

CheckResult residual_refinement_check() {
  ProblemSpec spec;
  spec.physical = PhysicalParameters{};
  spec.physical.l = std::numbers::pi;
  spec.coeffs = derive_coefficients(spec.physical);
  spec.tau = 0.25;
  spec.horizon = 1.0;
  spec.n_modes = 3;
  spec.initial.kind = DataSpec::Kind::SingleMode;
  spec.initial.mode = 1;
  spec.initial.amplitude = {0.8, 0.5, -0.3};
  spec.prehistory.kind = DataSpec::Kind::ConstantInitial;
  spec.forcing.kind = DataSpec::Kind::Zero;
  const Basis basis(spec.physical.l, spec.coeffs);
  const ModalData data = project_data(spec, basis);
  std::vector<ModalSystem> systems;
  for (std::size_t n = 0; n < spec.n_modes; ++n) {
    systems.push_back(build_modal_system(n, spec.coeffs, spec.physical.l));
  }
  const auto residual_at = [&](std::size_t nx, double dt) {
    ProblemSpec local = spec;
    local.grids.dt = dt;
    const std::vector<double> t_grid =
        uniform_grid(0.0, local.horizon,
                     static_cast<std::size_t>(std::lround(local.horizon / dt)) + 1);
    std::vector<Trajectory> trajectories;
    for (std::size_t n = 0; n < local.n_modes; ++n) {
      trajectories.push_back(solve_mode(systems[n], data, t_grid, local.horizon));
    }
    const std::vector<double> x_grid = uniform_grid(0.0, local.physical.l, nx);
    const FieldSolution field = reconstruct(local, basis, data, trajectories, x_grid, t_grid);
    return residual_check(field, local, basis, data);
  };
  const ResidualReport coarse = residual_at(17, 0.0125);
  const ResidualReport fine = residual_at(33, 0.00625);
  const double r1 = coarse.res1 / fine.res1;
  const double r2 = coarse.res2 / fine.res2;
  const double r3 = coarse.res3 / fine.res3;
  CheckResult r;
  r.name = "pde_residual_refinement";
  r.passed = r1 >= 2.8 && r1 <= 5.2 && r2 >= 2.8 && r2 <= 5.2 && r3 >= 2.8 && r3 <= 5.2;
  r.detail = "halving ratios " + fmt(r1) + ", " + fmt(r2) + ", " + fmt(r3);
  return r;
}

CheckResult continuous_dependence_suite(Rng& rng) {
  int satisfied = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    ProblemSpec spec;
    spec.physical = PhysicalParameters{};
    spec.physical.l = 40.0;
    spec.coeffs = DerivedCoefficients{rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0),
                                      rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)};
    if (frobenius_norm(modal_matrix(1, spec.coeffs, spec.physical.l)) > 1.0) {
      spec.coeffs = DerivedCoefficients{0.3, 0.3, 0.3, 0.3};
    }
    spec.tau = rng.uniform(0.1, 0.4);
    spec.horizon = 1.0;
    spec.n_modes = 2;
    spec.initial.kind = DataSpec::Kind::SingleMode;
    spec.initial.mode = 1;
    spec.initial.amplitude = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                              rng.uniform(-1.0, 1.0)};
    spec.prehistory.kind = DataSpec::Kind::ConstantInitial;
    spec.forcing.kind = trial % 3 == 0 ? DataSpec::Kind::SingleMode : DataSpec::Kind::Zero;
    if (trial % 5 == 0) spec.initial.kind = DataSpec::Kind::Zero;  // forcing-only problems
    if (spec.forcing.kind == DataSpec::Kind::SingleMode) {
      spec.forcing.mode = 1;
      spec.forcing.amplitude = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                rng.uniform(-1.0, 1.0)};
    }
    const Basis basis(spec.physical.l, spec.coeffs);
    const ModalData data = project_data(spec, basis);
    std::vector<ModalSystem> systems;
    for (std::size_t n = 0; n < spec.n_modes; ++n) {
      systems.push_back(build_modal_system(n, spec.coeffs, spec.physical.l));
    }
    const std::vector<double> grid = uniform_grid(0.0, spec.horizon, 41);
    std::vector<Trajectory> trajectories;
    for (std::size_t n = 0; n < spec.n_modes; ++n) {
      trajectories.push_back(solve_mode(systems[n], data, grid, spec.horizon));
    }
    const DependenceReport rep =
        continuous_dependence_check(systems, data, basis, trajectories, spec.horizon);
    if (rep.satisfied) ++satisfied;
  }
  CheckResult r;
  r.name = "continuous_dependence";
  r.passed = satisfied == trials;
  r.detail = std::to_string(satisfied) + "/" + std::to_string(trials) + " inequalities hold";
  return r;
}

CheckResult projection_reconstruction_check(Rng& rng) {
  double worst = 0.0;
  double worst_gram = 0.0;
  for (std::size_t n_modes : {8UL, 16UL, 32UL}) {
    ProblemSpec spec;
    spec.physical = PhysicalParameters{};
    spec.physical.l = 2.4;
    spec.coeffs = derive_coefficients(spec.physical);
    spec.tau = 0.2;
    spec.horizon = 0.5;
    spec.n_modes = n_modes;
    spec.initial.kind = DataSpec::Kind::Modal;
    spec.initial.modal.assign(8, {0.0, 0.0, 0.0});
    for (std::size_t n = 0; n < 8; ++n) {
      spec.initial.modal[n] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                               rng.uniform(-1.0, 1.0)};
    }
    spec.initial.modal[0][0] = 0.0;  // the zero mode has no first component
    spec.prehistory.kind = DataSpec::Kind::ConstantInitial;
    spec.forcing.kind = DataSpec::Kind::Zero;
    const Basis basis(spec.physical.l, spec.coeffs);

    // Round trip: evaluate the modal field in space, project it back.
    const auto rows = spec.initial.modal;
    ProblemSpec eval_spec = spec;
    eval_spec.initial.kind = DataSpec::Kind::Evaluator;
    eval_spec.initial.modal.clear();
    eval_spec.initial.evaluator = [rows, basis](double x, double) {
      std::array<double, 3> v{0.0, 0.0, 0.0};
      for (std::size_t n = 0; n < rows.size(); ++n) {
        const auto phi = basis.eval(n, x);
        for (std::size_t k = 0; k < 3; ++k) v[k] += rows[n][k] * phi[k];
      }
      return v;
    };
    const ModalData data = project_data(eval_spec, basis);
    double err_sq = 0.0;
    for (std::size_t n = 0; n < spec.n_modes; ++n) {
      const auto w = basis.mode_weights(n);
      for (std::size_t k = 0; k < 3; ++k) {
        const double expected = n < 8 ? rows[n][k] : 0.0;
        if (n == 0 && k == 0) continue;
        err_sq += w[k] * std::norm(data.initial[n][k] - Complex{expected, 0.0});
      }
    }
    worst = std::max(worst, std::sqrt(err_sq));
  }
  {
    const Basis basis(1.9, DerivedCoefficients{2.2, 0.6, 1.1, 0.9});
    const auto w = basis.component_weights();
    for (std::size_t m = 0; m <= 8; ++m) {
      for (std::size_t n = m; n <= 8; ++n) {
        const auto f = [&](double x) {
          const auto pm = basis.eval(m, x);
          const auto pn = basis.eval(n, x);
          return w[0] * pm[0] * pn[0] + w[1] * pm[1] * pn[1] + w[2] * pm[2] * pn[2];
        };
        const double g = integrate_scalar_uniform(f, 0.0, 1.9, 32);
        worst_gram = std::max(worst_gram, std::abs(g - (m == n ? 1.0 : 0.0)));
      }
    }
  }
  CheckResult r;
  r.name = "projection_reconstruction";
  r.passed = worst <= 1e-10 && worst_gram <= 1e-10;
  r.detail = "round-trip X-norm error " + fmt(worst) + ", Gram deviation " + fmt(worst_gram);
  return r;
}

}  // namespace

std::vector<CheckResult> run_validation_suite(std::uint64_t seed) {
  std::vector<CheckResult> results;
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  results.push_back(delayed_exp_definition_check());
  results.push_back(derivative_identity_check(rng));
  results.push_back(similarity_invariance_check(rng));
  results.push_back(oracle_equivalence_check(rng));
  results.push_back(eigenvalue_formula_check(rng));
  results.push_back(eigenvector_residual_check(rng));
  results.push_back(exp_comparison_check(rng));
  results.push_back(small_delay_convergence_check());
  results.push_back(residual_refinement_check());
  results.push_back(continuous_dependence_suite(rng));
  results.push_back(projection_reconstruction_check(rng));
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
  }
  return os.str();
}

}  // namespace delaytherm
