#include "delaytherm/delay_ode.hpp"

#include <algorithm>
#include <cmath>

#include "delaytherm/errors.hpp"
#include "delaytherm/quadrature.hpp"

namespace delaytherm {

void DelayIVP::check() const {
  if (!M.square()) throw InputError("delay IVP matrix must be square");
  if (!(tau > 0.0)) throw DomainError("tau must be > 0");
  if (!(horizon > 0.0)) throw DomainError("horizon must be > 0");
  if (x0.size() != M.rows()) throw InputError("initial state dimension mismatch");
  if (!prehistory) throw InputError("prehistory function missing");
  if (!forcing_is_zero && !forcing) throw InputError("forcing function missing");
}

namespace {

// Breakpoints of s -> exp_tau(-M, t - shift - s) on [lo, hi]: the points
// where the argument crosses a multiple of tau.
void argument_breakpoints(double t, double shift, double tau, double lo, double hi,
                          std::vector<double>& out) {
  // s = t - shift - j tau, j integer, argument j tau in [-tau, ...).
  const double j_min = std::floor((t - shift - hi) / tau) - 1.0;
  const double j_max = std::ceil((t - shift - lo) / tau) + 1.0;
  for (double j = j_min; j <= j_max; j += 1.0) {
    const double s = t - shift - j * tau;
    if (s > lo && s < hi) out.push_back(s);
  }
}

CVector closed_form_value(const DelayIVP& ivp, const ExpTauFn& exp_tau, double t) {
  const std::size_t d = ivp.dim();
  if (t < 0.0) {
    if (t < -ivp.tau) throw DomainError("time below -tau");
    return ivp.prehistory(t);
  }
  if (t == 0.0) return ivp.x0;

  CVector x = exp_tau(t - ivp.tau) * ivp.x0;

  // Prehistory term; arguments below -tau contribute nothing, so the
  // integration range shrinks to [-tau, min(0, t - tau)].
  const double hist_hi = std::min(0.0, t - ivp.tau);
  if (hist_hi > -ivp.tau) {
    std::vector<double> cuts;
    argument_breakpoints(t, 2.0 * ivp.tau, ivp.tau, -ivp.tau, hist_hi, cuts);
    for (double k : ivp.prehistory_knots) {
      if (k > -ivp.tau && k < hist_hi) cuts.push_back(k);
    }
    const auto integrand = [&](double s) {
      return exp_tau(t - 2.0 * ivp.tau - s) * ivp.prehistory(s);
    };
    const QuadratureResult hist = integrate_breakpoints(integrand, -ivp.tau, hist_hi, cuts, d);
    const CVector mx = ivp.M * hist.value;
    for (std::size_t i = 0; i < d; ++i) x[i] -= mx[i];
  }

  if (!ivp.forcing_is_zero && t > 0.0) {
    std::vector<double> cuts;
    argument_breakpoints(t, ivp.tau, ivp.tau, 0.0, t, cuts);
    for (double k : ivp.forcing_knots) {
      if (k > 0.0 && k < t) cuts.push_back(k);
    }
    const auto integrand = [&](double s) { return exp_tau(t - ivp.tau - s) * ivp.forcing(s); };
    const QuadratureResult forc = integrate_breakpoints(integrand, 0.0, t, cuts, d);
    for (std::size_t i = 0; i < d; ++i) x[i] += forc.value[i];
  }
  return x;
}

}  // namespace

Trajectory solve_closed_form(const DelayIVP& ivp, std::span<const double> t_grid,
                             const ExpTauFn* exp_tau_override) {
  ivp.check();
  for (double t : t_grid) {
    if (t > ivp.horizon + 1e-12 * std::max(1.0, ivp.horizon)) {
      throw InputError("grid time beyond horizon");
    }
  }

  CMatrix neg = ivp.M;
  neg *= Complex{-1.0, 0.0};
  std::optional<DelayedExpEvaluator> direct;
  ExpTauFn exp_tau;
  if (exp_tau_override != nullptr) {
    exp_tau = *exp_tau_override;
  } else {
    direct.emplace(std::move(neg), ivp.tau);
    exp_tau = [&ev = *direct](double t) { return ev(t); };
  }

  Trajectory out;
  out.solver = exp_tau_override ? "closed_form_diag" : "closed_form_direct";
  out.quadrature_order = 16;
  out.times.assign(t_grid.begin(), t_grid.end());
  out.states.reserve(t_grid.size());
  for (double t : t_grid) {
    CVector x = closed_form_value(ivp, exp_tau, t);
    if (!all_finite(x)) throw NumericError("closed-form state is not finite");
    out.states.push_back(std::move(x));
  }
  return out;
}

namespace {

struct DenseKnots {
  std::vector<double> t;
  std::vector<CVector> x;
  // One-sided endpoint slopes per subinterval [t_j, t_{j+1}]; the solution's
  // derivative jumps where the delayed argument crosses the prehistory
  // discontinuity, so a shared knot slope would corrupt the adjacent piece.
  std::vector<CVector> slope_left;
  std::vector<CVector> slope_right;

  // Cubic Hermite interpolation between stored knots.
  CVector eval(double s, std::size_t dim) const {
    if (s <= t.front()) return x.front();
    if (s >= t.back()) return x.back();
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    const std::size_t j = static_cast<std::size_t>(it - t.begin()) - 1;
    const double h = t[j + 1] - t[j];
    const double u = (s - t[j]) / h;
    const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    const double h10 = u * (1.0 - u) * (1.0 - u);
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = u * u * (u - 1.0);
    CVector out(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      out[i] = h00 * x[j][i] + h10 * h * slope_left[j][i] + h01 * x[j + 1][i] +
               h11 * h * slope_right[j][i];
    }
    return out;
  }
};

}  // namespace

Trajectory solve_method_of_steps(const DelayIVP& ivp, std::span<const double> t_grid,
                                 double step) {
  ivp.check();
  if (!(step > 0.0) || step > ivp.tau / 50.0 * (1.0 + 1e-12)) {
    throw DomainError("method-of-steps step must satisfy step <= tau/50");
  }
  const std::size_t d = ivp.dim();
  double t_end = 0.0;
  for (double t : t_grid) t_end = std::max(t_end, t);

  // Within the first delay interval the delayed argument reads the
  // prehistory branch, including its left limit at 0 when the data are
  // incompatible (strong solutions); afterwards the stored solution branch
  // applies. Steps never straddle an interval boundary.
  const auto delayed_state = [&](const DenseKnots& knots, double s,
                                 bool prehistory_branch) -> CVector {
    if (s < 0.0 || (s == 0.0 && prehistory_branch)) return ivp.prehistory(s);
    if (s == 0.0) return ivp.x0;
    return knots.eval(s, d);
  };
  const auto rhs = [&](const DenseKnots& knots, double t, bool prehistory_branch) -> CVector {
    // Accumulated step noise must not push a boundary stage onto the wrong
    // side of the prehistory jump at argument zero.
    double s = t - ivp.tau;
    if (std::abs(s) <= 1e-9 * ivp.tau) s = 0.0;
    CVector debt = ivp.M * delayed_state(knots, s, prehistory_branch);
    CVector out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = -debt[i];
    if (!ivp.forcing_is_zero) {
      const CVector f = ivp.forcing(t);
      for (std::size_t i = 0; i < d; ++i) out[i] += f[i];
    }
    return out;
  };

  DenseKnots knots;
  knots.t.push_back(0.0);
  knots.x.push_back(ivp.x0);

  // Steps aligned to delay-interval boundaries: m substeps per interval.
  const std::size_t m = static_cast<std::size_t>(std::ceil(ivp.tau / step - 1e-12));
  const double h = ivp.tau / static_cast<double>(m);
  double t = 0.0;
  CVector x = ivp.x0;
  while (t < t_end - 1e-12 * std::max(1.0, t_end)) {
    const double hh = std::min(h, t_end - t);
    const bool first_interval = t < ivp.tau - 0.5 * hh;
    // The right side is independent of the current state (pure delay), so
    // classical RK4 collapses to Simpson on the driving term; the two
    // midpoint stages coincide. k1/k4 double as the subinterval's
    // one-sided Hermite slopes.
    const CVector k1 = rhs(knots, t, first_interval);
    const CVector k_mid = rhs(knots, t + 0.5 * hh, first_interval);
    const CVector k4 = rhs(knots, t + hh, first_interval);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] += hh / 6.0 * (k1[i] + 4.0 * k_mid[i] + k4[i]);
    }
    t += hh;
    knots.t.push_back(t);
    knots.x.push_back(x);
    knots.slope_left.push_back(k1);
    knots.slope_right.push_back(k4);
  }

  Trajectory out;
  out.solver = "method_of_steps_rk4";
  out.times.assign(t_grid.begin(), t_grid.end());
  out.states.reserve(t_grid.size());
  for (double tq : t_grid) {
    CVector xq;
    if (tq < 0.0) {
      xq = ivp.prehistory(tq);
    } else if (tq == 0.0) {
      xq = ivp.x0;
    } else {
      xq = knots.eval(tq, d);
    }
    if (!all_finite(xq)) throw NumericError("method-of-steps state is not finite");
    out.states.push_back(std::move(xq));
  }
  return out;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size()) throw InputError("trajectory grids differ in length");
  double dist = 0.0;
  for (std::size_t j = 0; j < a.times.size(); ++j) {
    if (std::abs(a.times[j] - b.times[j]) > 1e-12 * std::max(1.0, std::abs(a.times[j]))) {
      throw InputError("trajectory grids differ");
    }
    const CVector diff = a.states[j] - b.states[j];
    dist = std::max(dist, vector_norm(diff));
  }
  return dist;
}

}  // namespace delaytherm
