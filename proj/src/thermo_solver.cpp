#include "delaytherm/thermo_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "delaytherm/errors.hpp"
#include "delaytherm/quadrature.hpp"

namespace delaytherm {

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2) throw DomainError("grid needs at least 2 points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  g.back() = hi;
  return g;
}

std::array<double, 3> project_sample(const Basis& basis, std::size_t n,
                                     const std::function<std::array<double, 3>(double)>& field) {
  const double l = basis.length();
  const auto norms_sq = basis.component_norms_sq(n);
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    if (norms_sq[k] == 0.0) continue;
    const auto integrand = [&](double x) { return field(x)[k] * basis.eval(n, x)[k]; };
    const double coarse = integrate_scalar_uniform(integrand, 0.0, l, 32);
    const double fine = integrate_scalar_uniform(integrand, 0.0, l, 64);
    if (std::abs(fine - coarse) > 1e-9 * (1.0 + std::abs(fine))) {
      throw NumericError("projection quadrature did not converge", std::abs(fine - coarse));
    }
    out[k] = fine / norms_sq[k];
  }
  return out;
}

namespace {

CVector to_cvector(const std::array<double, 3>& v) {
  return CVector{Complex{v[0], 0.0}, Complex{v[1], 0.0}, Complex{v[2], 0.0}};
}

std::function<std::array<double, 3>(double)> space_eval(const DataSpec& d, double t) {
  if (d.kind == DataSpec::Kind::GaussianBump) {
    const double c = d.center, w = d.width, amp = d.bump_amplitude;
    const int comp = d.component;
    return [c, w, amp, comp](double x) {
      std::array<double, 3> v{0.0, 0.0, 0.0};
      const double z = (x - c) / w;
      v[static_cast<std::size_t>(comp)] = amp * std::exp(-z * z);
      return v;
    };
  }
  if (d.kind == DataSpec::Kind::Evaluator) {
    auto f = d.evaluator;
    return [f, t](double x) { return f(x, t); };
  }
  throw InputError("data kind has no pointwise space evaluation");
}

// Modal coefficient rows of one data entry at a fixed time.
std::vector<std::array<double, 3>> coefficient_rows(const DataSpec& d, const Basis& basis,
                                                    std::size_t n_modes, double t) {
  std::vector<std::array<double, 3>> rows(n_modes, {0.0, 0.0, 0.0});
  switch (d.kind) {
    case DataSpec::Kind::Zero:
      break;
    case DataSpec::Kind::SingleMode:
      if (d.mode >= n_modes) throw DomainError("single_mode index beyond the retained modes");
      rows[d.mode] = d.amplitude;
      break;
    case DataSpec::Kind::Modal:
      if (d.modal.size() > n_modes) {
        throw DomainError("modal data carries more modes than the retained count");
      }
      std::copy(d.modal.begin(), d.modal.end(), rows.begin());
      break;
    case DataSpec::Kind::GaussianBump:
    case DataSpec::Kind::Evaluator: {
      const auto f = space_eval(d, t);
      for (std::size_t n = 0; n < n_modes; ++n) rows[n] = project_sample(basis, n, f);
      break;
    }
    case DataSpec::Kind::ConstantInitial:
      throw InputError("constant prehistory has no standalone coefficients");
  }
  return rows;
}

}  // namespace

ModalData project_data(const ProblemSpec& spec, const Basis& basis,
                       std::size_t prehistory_samples) {
  ModalData data;
  data.n_modes = spec.n_modes;
  data.tau = spec.tau;

  const auto initial_rows = coefficient_rows(spec.initial, basis, spec.n_modes, 0.0);
  data.initial.reserve(spec.n_modes);
  for (const auto& r : initial_rows) data.initial.push_back(to_cvector(r));

  // Prehistory coefficients as maps [-tau, 0] -> R^3.
  data.prehistory.resize(spec.n_modes);
  switch (spec.prehistory.kind) {
    case DataSpec::Kind::ConstantInitial:
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        const CVector v = data.initial[n];
        data.prehistory[n] = [v](double) { return v; };
      }
      break;
    case DataSpec::Kind::Zero:
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        data.prehistory[n] = [](double) { return CVector(3, Complex{0.0, 0.0}); };
      }
      break;
    case DataSpec::Kind::SingleMode:
    case DataSpec::Kind::Modal: {
      const auto rows = coefficient_rows(spec.prehistory, basis, spec.n_modes, 0.0);
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        const CVector v = to_cvector(rows[n]);
        data.prehistory[n] = [v](double) { return v; };
      }
      break;
    }
    case DataSpec::Kind::GaussianBump:
    case DataSpec::Kind::Evaluator: {
      // Sample on a uniform grid over [-tau, 0], linear interpolation in t.
      if (prehistory_samples < 2) throw DomainError("prehistory needs at least 2 samples");
      const std::size_t m = prehistory_samples;
      auto times = std::make_shared<std::vector<double>>(uniform_grid(-spec.tau, 0.0, m));
      auto values =
          std::make_shared<std::vector<std::vector<std::array<double, 3>>>>(m);
      for (std::size_t j = 0; j < m; ++j) {
        // A bump prehistory is constant in time; evaluators see the real t.
        const double t = spec.prehistory.kind == DataSpec::Kind::GaussianBump ? 0.0 : (*times)[j];
        (*values)[j] = coefficient_rows(spec.prehistory, basis, spec.n_modes, t);
      }
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        data.prehistory[n] = [times, values, n](double s) {
          const auto& ts = *times;
          if (s <= ts.front()) return to_cvector((*values).front()[n]);
          if (s >= ts.back()) return to_cvector((*values).back()[n]);
          const auto it = std::upper_bound(ts.begin(), ts.end(), s);
          const std::size_t j = static_cast<std::size_t>(it - ts.begin()) - 1;
          const double u = (s - ts[j]) / (ts[j + 1] - ts[j]);
          CVector out(3);
          for (std::size_t k = 0; k < 3; ++k) {
            const double lo = (*values)[j][n][k], hi = (*values)[j + 1][n][k];
            out[k] = Complex{lo + u * (hi - lo), 0.0};
          }
          return out;
        };
      }
      for (std::size_t j = 1; j + 1 < m; ++j) data.prehistory_knots.push_back((*times)[j]);
      break;
    }
  }

  // Forcing coefficients as maps [0, T] -> R^3.
  data.forcing.resize(spec.n_modes);
  switch (spec.forcing.kind) {
    case DataSpec::Kind::Zero:
      data.forcing_is_zero = true;
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        data.forcing[n] = [](double) { return CVector(3, Complex{0.0, 0.0}); };
      }
      break;
    case DataSpec::Kind::SingleMode:
    case DataSpec::Kind::Modal:
    case DataSpec::Kind::GaussianBump: {
      data.forcing_is_zero = false;
      const auto rows = coefficient_rows(spec.forcing, basis, spec.n_modes, 0.0);
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        const CVector v = to_cvector(rows[n]);
        data.forcing[n] = [v](double) { return v; };
      }
      break;
    }
    case DataSpec::Kind::Evaluator: {
      data.forcing_is_zero = false;
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        const DataSpec d = spec.forcing;
        const Basis b = basis;
        data.forcing[n] = [d, b, n](double t) {
          return to_cvector(project_sample(b, n, space_eval(d, t)));
        };
      }
      break;
    }
    case DataSpec::Kind::ConstantInitial:
      throw InputError("constant-initial is not a forcing kind");
  }
  return data;
}

Trajectory solve_mode(const ModalSystem& sys, const ModalData& data,
                      std::span<const double> t_grid, double horizon) {
  if (sys.n >= data.n_modes) throw InputError("mode index beyond projected data");
  DelayIVP ivp;
  ivp.M = sys.B;
  ivp.tau = data.tau;
  ivp.x0 = data.initial[sys.n];
  ivp.prehistory = data.prehistory[sys.n];
  ivp.prehistory_knots = data.prehistory_knots;
  ivp.forcing = data.forcing[sys.n];
  ivp.forcing_knots = data.forcing_knots;
  ivp.forcing_is_zero = data.forcing_is_zero;
  ivp.horizon = horizon;

  if (!sys.diagonalizable) return solve_closed_form(ivp, t_grid);

  // exp_tau(-B_n, t) = S diag(exp_tau(-mu_k, t)) S^-1.
  const CMatrix s = sys.S;
  const CMatrix s_inv = sys.S_inv;
  const std::array<Complex, 3> mu = sys.D;
  const double tau = data.tau;
  const ExpTauFn diag_exp = [s, s_inv, mu, tau](double t) {
    CMatrix d(3, 3);
    for (std::size_t i = 0; i < 3; ++i) d(i, i) = delayed_exp_scalar(-mu[i], tau, t);
    return s * d * s_inv;
  };
  return solve_closed_form(ivp, t_grid, &diag_exp);
}

Trajectory classical_mode_reference(const ModalSystem& sys, const ModalData& data,
                                    std::span<const double> t_grid) {
  if (sys.n >= data.n_modes) throw InputError("mode index beyond projected data");
  CMatrix neg = sys.B;
  neg *= Complex{-1.0, 0.0};

  Trajectory out;
  out.solver = "classical_duhamel";
  out.quadrature_order = 16;
  out.times.assign(t_grid.begin(), t_grid.end());
  out.states.reserve(t_grid.size());
  const CVector x0 = data.initial[sys.n];
  for (double t : t_grid) {
    if (t < 0.0) throw InputError("classical reference defined for t >= 0");
    CVector x = classical_exp_matrix(neg, t) * x0;
    if (!data.forcing_is_zero && t > 0.0) {
      const auto integrand = [&](double s) {
        return classical_exp_matrix(neg, t - s) * data.forcing[sys.n](s);
      };
      std::vector<double> cuts = data.forcing_knots;
      const QuadratureResult q = integrate_breakpoints(integrand, 0.0, t, cuts, 3);
      for (std::size_t i = 0; i < 3; ++i) x[i] += q.value[i];
    }
    if (!all_finite(x)) throw NumericError("classical reference state is not finite");
    out.states.push_back(std::move(x));
  }
  return out;
}

FieldSolution reconstruct(const ProblemSpec& spec, const Basis& basis, const ModalData& data,
                          const std::vector<Trajectory>& modal_trajectories,
                          std::span<const double> x_grid, std::span<const double> t_grid) {
  if (modal_trajectories.size() != spec.n_modes) {
    throw InputError("one trajectory per retained mode is required");
  }
  for (const auto& tr : modal_trajectories) {
    if (tr.times.size() != t_grid.size()) throw InputError("trajectory grid mismatch");
  }
  FieldSolution field;
  field.x_grid.assign(x_grid.begin(), x_grid.end());
  field.t_grid.assign(t_grid.begin(), t_grid.end());

  const std::size_t nx = x_grid.size();
  const std::size_t nt = t_grid.size();
  field.V.assign(nt, std::vector<std::array<double, 3>>(nx, {0.0, 0.0, 0.0}));
  field.u.assign(nt, std::vector<double>(nx, 0.0));
  field.theta.assign(nt, std::vector<double>(nx, 0.0));

  double scale = 0.0;
  double max_imag = 0.0;
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      CompensatedSum acc[3];
      CompensatedSum imag_acc[3];
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        const auto phi = basis.eval(n, x_grid[i]);
        const CVector& state = modal_trajectories[n].states[j];
        for (std::size_t k = 0; k < 3; ++k) {
          acc[k].add(state[k].real() * phi[k]);
          imag_acc[k].add(state[k].imag() * phi[k]);
        }
      }
      for (std::size_t k = 0; k < 3; ++k) {
        field.V[j][i][k] = acc[k].value();
        scale = std::max(scale, std::abs(field.V[j][i][k]));
        max_imag = std::max(max_imag, std::abs(imag_acc[k].value()));
      }
    }
  }
  if (max_imag > 1e-10 * std::max(1.0, scale)) {
    throw NumericError("assembled field carries an imaginary residue", max_imag);
  }

  // Displacement at t = 0 from the second component's initial coefficients,
  // pinned by u(0) = 0: the antiderivative of sum_n c_n phi_n^2.
  std::vector<double> u0(nx, 0.0);
  for (std::size_t i = 0; i < nx; ++i) {
    CompensatedSum acc;
    for (std::size_t n = 0; n < spec.n_modes; ++n) {
      const double c = data.initial[n][1].real();
      if (c == 0.0) continue;
      if (n == 0) {
        acc.add(c * basis.scale(0) * x_grid[i]);
      } else {
        const double nu = wavenumber(n, basis.length());
        acc.add(c * basis.scale(n) * std::sin(nu * x_grid[i]) / nu);
      }
    }
    u0[i] = acc.value();
  }

  for (std::size_t i = 0; i < nx; ++i) {
    double integral = 0.0;
    field.u[0][i] = u0[i];
    field.theta[0][i] = field.V[0][i][2];
    for (std::size_t j = 1; j < nt; ++j) {
      const double dt = t_grid[j] - t_grid[j - 1];
      integral += 0.5 * dt * (field.V[j - 1][i][0] + field.V[j][i][0]);
      field.u[j][i] = u0[i] + integral;
      field.theta[j][i] = field.V[j][i][2];
    }
  }
  return field;
}

namespace {

double weighted_norm_sq(const CVector& v, const std::array<double, 3>& w) {
  double s = 0.0;
  for (std::size_t k = 0; k < 3; ++k) s += w[k] * std::norm(v[k]);
  return s;
}

}  // namespace

Norms norms(const std::vector<CVector>& modal_values, const std::vector<ModalSystem>& systems,
            const Basis& basis, double tol) {
  if (modal_values.size() > systems.size()) throw InputError("missing modal systems for norms");
  Norms out;
  double x_sq = 0.0;
  double xinf_sq = 0.0;
  for (std::size_t n = 0; n < modal_values.size(); ++n) {
    const auto w = basis.mode_weights(n);
    x_sq += weighted_norm_sq(modal_values[n], w);

    CVector power = modal_values[n];
    double inv_fact = 1.0;
    double mode_sum = weighted_norm_sq(power, w);
    for (std::size_t k = 1; k <= 10000; ++k) {
      power = systems[n].B * power;
      inv_fact /= static_cast<double>(k);
      const double term = inv_fact * weighted_norm_sq(power, w);
      mode_sum += term;
      if (!std::isfinite(mode_sum)) break;
      if (term <= tol * mode_sum) break;
    }
    xinf_sq += mode_sum;
  }
  out.x_norm = std::sqrt(x_sq);
  out.x_inf_norm = std::sqrt(xinf_sq);
  return out;
}

ConvergenceReport convergence_study(const ProblemSpec& spec, std::span<const double> tau_list) {
  if (tau_list.size() < 3) throw DomainError("convergence study needs at least 3 delays");
  for (std::size_t i = 1; i < tau_list.size(); ++i) {
    if (!(tau_list[i] < tau_list[i - 1])) {
      throw DomainError("tau list must be strictly decreasing");
    }
  }

  const Basis basis(spec.physical.l, spec.coeffs);
  std::vector<ModalSystem> systems;
  systems.reserve(spec.n_modes);
  for (std::size_t n = 0; n < spec.n_modes; ++n) {
    systems.push_back(build_modal_system(n, spec.coeffs, spec.physical.l));
  }

  ConvergenceReport report;
  report.taus.assign(tau_list.begin(), tau_list.end());
  const double horizon = spec.horizon;

  for (double tau : tau_list) {
    ProblemSpec local = spec;
    local.tau = tau;
    local.prehistory.kind = DataSpec::Kind::ConstantInitial;
    const ModalData data = project_data(local, basis);

    const std::size_t steps = static_cast<std::size_t>(std::ceil(20.0 * horizon / tau));
    const std::vector<double> t_grid = uniform_grid(0.0, horizon, steps + 1);

    double sup_err = 0.0;
    std::vector<double> per_mode(spec.n_modes, 0.0);
    std::vector<double> err_sq_at(t_grid.size(), 0.0);
    double forcing_sup = 0.0;
    for (std::size_t n = 0; n < spec.n_modes; ++n) {
      const Trajectory delayed = solve_mode(systems[n], data, t_grid, horizon);
      const Trajectory classical = classical_mode_reference(systems[n], data, t_grid);
      const auto w = basis.mode_weights(n);
      for (std::size_t j = 0; j < t_grid.size(); ++j) {
        const CVector diff = delayed.states[j] - classical.states[j];
        const double d_sq = weighted_norm_sq(diff, w);
        err_sq_at[j] += d_sq;
        per_mode[n] = std::max(per_mode[n], std::sqrt(d_sq));
      }
    }
    for (double e : err_sq_at) sup_err = std::max(sup_err, std::sqrt(e));

    // Data terms of the theorem bound, in the truncated X norm.
    double v0_sq = 0.0;
    for (std::size_t n = 0; n < spec.n_modes; ++n) {
      v0_sq += weighted_norm_sq(data.initial[n], basis.mode_weights(n));
    }
    const double v0_norm = std::sqrt(v0_sq);
    const double hist_l1 = tau * v0_norm;  // constant-in-time prehistory
    if (!data.forcing_is_zero) {
      for (double t : t_grid) {
        double f_sq = 0.0;
        for (std::size_t n = 0; n < spec.n_modes; ++n) {
          f_sq += weighted_norm_sq(data.forcing[n](t), basis.mode_weights(n));
        }
        forcing_sup = std::max(forcing_sup, std::sqrt(f_sq));
      }
    }
    const double bound = tau * std::exp(horizon) *
                         (v0_norm + (1.0 + tau) * hist_l1 + horizon * forcing_sup);

    report.sup_errors.push_back(sup_err);
    report.per_mode.push_back(std::move(per_mode));
    report.bounds.push_back(bound);
    report.bound_satisfied.push_back(sup_err <= bound * (1.0 + 1e-12));
  }

  // Log-log slope by least squares over the nonzero errors.
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < report.taus.size(); ++i) {
    if (report.sup_errors[i] > 1e-300) {
      lx.push_back(std::log(report.taus[i]));
      ly.push_back(std::log(report.sup_errors[i]));
    }
  }
  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx > 0.0) {
      report.slope = sxy / sxx;
      report.slope_defined = true;
    }
  }
  return report;
}

ResidualReport residual_check(const FieldSolution& field, const ProblemSpec& spec,
                              const Basis& basis, const ModalData& data) {
  const std::size_t nx = field.x_grid.size();
  const std::size_t nt = field.t_grid.size();
  if (nx < 7 || nt < 7) throw InputError("residual grid too coarse: fewer than 5 interior points");
  const double dx = field.x_grid[1] - field.x_grid[0];
  const double dt = field.t_grid[1] - field.t_grid[0];
  const double ratio = spec.tau / dt;
  const long m_tau = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(m_tau)) > 1e-9 * std::max(1.0, ratio) || m_tau < 1) {
    throw InputError("residual check requires tau to be an integer multiple of dt");
  }

  // Delayed row at time t < 0 comes from the prehistory coefficients.
  const auto prehistory_row = [&](double t) {
    std::vector<std::array<double, 3>> row(nx, {0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < nx; ++i) {
      CompensatedSum acc[3];
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        const auto phi = basis.eval(n, field.x_grid[i]);
        const CVector c = data.prehistory[n](t);
        for (std::size_t k = 0; k < 3; ++k) acc[k].add(c[k].real() * phi[k]);
      }
      for (std::size_t k = 0; k < 3; ++k) row[i][k] = acc[k].value();
    }
    return row;
  };
  const auto forcing_row = [&](double t) {
    std::vector<std::array<double, 3>> row(nx, {0.0, 0.0, 0.0});
    if (data.forcing_is_zero) return row;
    for (std::size_t i = 0; i < nx; ++i) {
      CompensatedSum acc[3];
      for (std::size_t n = 0; n < spec.n_modes; ++n) {
        const auto phi = basis.eval(n, field.x_grid[i]);
        const CVector c = data.forcing[n](t);
        for (std::size_t k = 0; k < 3; ++k) acc[k].add(c[k].real() * phi[k]);
      }
      for (std::size_t k = 0; k < 3; ++k) row[i][k] = acc[k].value();
    }
    return row;
  };

  const auto near_breakpoint = [&](double t) {
    const double r = t / spec.tau;
    return std::abs(r - std::round(r)) * spec.tau <= 1.5 * dt;
  };

  const double a = spec.coeffs.a, b = spec.coeffs.b, c = spec.coeffs.c, d = spec.coeffs.d;
  ResidualReport rep;
  for (std::size_t j = 1; j + 1 < nt; ++j) {
    const double t = field.t_grid[j];
    if (near_breakpoint(t)) continue;
    const long jd = static_cast<long>(j) - m_tau;
    std::vector<std::array<double, 3>> delayed;
    const std::vector<std::array<double, 3>>* delayed_ptr = nullptr;
    if (jd >= 0) {
      delayed_ptr = &field.V[static_cast<std::size_t>(jd)];
    } else {
      delayed = prehistory_row(t - spec.tau);
      delayed_ptr = &delayed;
    }
    const auto f_row = forcing_row(t);
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const auto& vm = field.V[j - 1][i];
      const auto& vp = field.V[j + 1][i];
      const auto& dl = (*delayed_ptr)[i - 1];
      const auto& dc = (*delayed_ptr)[i];
      const auto& dr = (*delayed_ptr)[i + 1];

      const double dt_v1 = (vp[0] - vm[0]) / (2.0 * dt);
      const double dt_v2 = (vp[1] - vm[1]) / (2.0 * dt);
      const double dt_v3 = (vp[2] - vm[2]) / (2.0 * dt);
      const double dx_v1 = (dr[0] - dl[0]) / (2.0 * dx);
      const double dx_v2 = (dr[1] - dl[1]) / (2.0 * dx);
      const double dx_v3 = (dr[2] - dl[2]) / (2.0 * dx);
      const double dxx_v3 = (dr[2] - 2.0 * dc[2] + dl[2]) / (dx * dx);

      rep.res1 = std::max(rep.res1, std::abs(dt_v1 - a * dx_v2 + b * dx_v3 - f_row[i][0]));
      rep.res2 = std::max(rep.res2, std::abs(dt_v2 - dx_v1));
      rep.res3 = std::max(rep.res3, std::abs(dt_v3 + d * dx_v1 - c * dxx_v3 - f_row[i][2]));
    }
  }
  return rep;
}

DependenceReport continuous_dependence_check(const std::vector<ModalSystem>& systems,
                                             const ModalData& data, const Basis& basis,
                                             const std::vector<Trajectory>& trajectories,
                                             double horizon) {
  if (trajectories.size() != data.n_modes) throw InputError("one trajectory per mode expected");
  DependenceReport rep;

  const std::size_t nt = trajectories.empty() ? 0 : trajectories[0].times.size();
  std::vector<CVector> stack(data.n_modes);
  for (std::size_t j = 0; j < nt; ++j) {
    if (trajectories[0].times[j] < 0.0) continue;
    for (std::size_t n = 0; n < data.n_modes; ++n) stack[n] = trajectories[n].states[j];
    rep.lhs = std::max(rep.lhs, norms(stack, systems, basis).x_inf_norm);
  }

  for (std::size_t n = 0; n < data.n_modes; ++n) stack[n] = data.initial[n];
  const double xinf_v0 = norms(stack, systems, basis).x_inf_norm;

  double hist_sup = 0.0;
  const std::vector<double> s_grid = uniform_grid(-data.tau, 0.0, 33);
  for (double s : s_grid) {
    for (std::size_t n = 0; n < data.n_modes; ++n) stack[n] = data.prehistory[n](s);
    hist_sup = std::max(hist_sup, norms(stack, systems, basis).x_inf_norm);
  }

  double forcing_l2 = 0.0;
  if (!data.forcing_is_zero) {
    const auto integrand = [&](double t) {
      std::vector<CVector> fs(data.n_modes);
      for (std::size_t n = 0; n < data.n_modes; ++n) fs[n] = data.forcing[n](t);
      const double v = norms(fs, systems, basis).x_inf_norm;
      return v * v;
    };
    forcing_l2 = std::sqrt(integrate_scalar_uniform(integrand, 0.0, horizon, 16));
  }

  const double e_t = std::exp(horizon);
  rep.rhs = e_t * xinf_v0 + data.tau * e_t * hist_sup + std::sqrt(horizon) * e_t * forcing_l2;
  rep.satisfied = rep.lhs <= rep.rhs * (1.0 + 1e-12);
  return rep;
}

}  // namespace delaytherm
