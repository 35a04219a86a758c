#include "delaytherm/delayed_exp.hpp"

#include <algorithm>
#include <cmath>

#include "delaytherm/errors.hpp"

namespace delaytherm {

namespace {

void require_positive_delay(double tau) {
  if (!(tau > 0.0)) throw DomainError("tau must be > 0");
}

// Number of series terms for time t: floor(t/tau) + 1 (empty on [-tau, 0)).
long series_terms(double tau, double t) {
  const long k = static_cast<long>(std::floor(t / tau)) + 1;
  return std::max(k, 0L);
}

// (dt)^k / k! accumulated as a product of dt/j factors; never overflows
// unless the true term magnitude does.
double power_over_factorial(double dt, long k) {
  double f = 1.0;
  for (long j = 1; j <= k; ++j) f *= dt / static_cast<double>(j);
  return f;
}

}  // namespace

Complex delayed_exp_scalar(Complex lambda, double tau, double t) {
  require_positive_delay(tau);
  if (t < -tau) return Complex{0.0, 0.0};
  const long kmax = series_terms(tau, t);
  CompensatedSum re, im;
  re.add(1.0);
  Complex lam_pow{1.0, 0.0};
  for (long k = 1; k <= kmax; ++k) {
    lam_pow *= lambda;
    const double dt = t - static_cast<double>(k - 1) * tau;
    const Complex term = lam_pow * power_over_factorial(dt, k);
    re.add(term.real());
    im.add(term.imag());
  }
  return Complex{re.value(), im.value()};
}

DelayedExpEvaluator::DelayedExpEvaluator(CMatrix operand, double tau)
    : operand_(std::move(operand)), tau_(tau) {
  require_positive_delay(tau_);
  if (!operand_.square()) throw InputError("delayed exponential operand must be square");
  powers_.push_back(CMatrix::identity(operand_.rows()));
}

const CMatrix& DelayedExpEvaluator::power(std::size_t k) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  while (powers_.size() <= k) powers_.push_back(powers_.back() * operand_);
  return powers_[k];
}

CMatrix DelayedExpEvaluator::operator()(double t) const {
  const std::size_t d = dim();
  if (t < -tau_) return CMatrix::zero(d, d);
  const long kmax = series_terms(tau_, t);
  CompensatedMatrixSum acc(d, d);
  acc.add(CMatrix::identity(d));
  for (long k = 1; k <= kmax; ++k) {
    const double dt = t - static_cast<double>(k - 1) * tau_;
    CMatrix term = power(static_cast<std::size_t>(k));
    term *= Complex{power_over_factorial(dt, k), 0.0};
    acc.add(term);
  }
  return acc.value();
}

CMatrix DelayedExpEvaluator::piece_increment(double t) const {
  const std::size_t d = dim();
  if (t <= 0.0) return CMatrix::zero(d, d);
  const long kmax = series_terms(tau_, t);
  const double dt = t - static_cast<double>(kmax - 1) * tau_;
  CMatrix term = power(static_cast<std::size_t>(kmax));
  term *= Complex{power_over_factorial(dt, kmax), 0.0};
  return term;
}

CMatrix delayed_exp_matrix_direct(const CMatrix& m, double tau, double t) {
  return DelayedExpEvaluator(m, tau)(t);
}

CMatrix delayed_exp_matrix_diag(const CMatrix& s, std::span<const Complex> eigenvalues,
                                const CMatrix& s_inv, double tau, double t) {
  require_positive_delay(tau);
  const std::size_t d = s.rows();
  if (!s.square() || !s_inv.square() || s_inv.rows() != d || eigenvalues.size() != d) {
    throw InputError("inconsistent eigen-decomposition shapes");
  }
  const CMatrix prod = s * s_inv;
  const CMatrix residual = prod - CMatrix::identity(d);
  const double tol = 1e-12 * std::max(1.0, frobenius_norm(s) * frobenius_norm(s_inv));
  if (frobenius_norm(residual) > tol) {
    throw InputError("S_inv is not an inverse of S within tolerance");
  }
  if (t < -tau) return CMatrix::zero(d, d);
  CMatrix diag(d, d);
  for (std::size_t i = 0; i < d; ++i) diag(i, i) = delayed_exp_scalar(eigenvalues[i], tau, t);
  return s * diag * s_inv;
}

CMatrix classical_exp_matrix(const CMatrix& m, double t) {
  if (!m.square()) throw InputError("matrix exponential of non-square matrix");
  const std::size_t d = m.rows();
  CMatrix a = m;
  a *= Complex{t, 0.0};
  const double norm = frobenius_norm(a);
  int squarings = 0;
  if (norm > 1.0) {
    squarings = static_cast<int>(std::ceil(std::log2(norm)));
    a *= Complex{std::ldexp(1.0, -squarings), 0.0};
  }
  CMatrix result = CMatrix::identity(d);
  CMatrix term = CMatrix::identity(d);
  for (int k = 1; k <= 64; ++k) {
    term = term * a;
    term *= Complex{1.0 / static_cast<double>(k), 0.0};
    result += term;
    if (frobenius_norm(term) <= 1e-18 * frobenius_norm(result)) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!all_finite(result)) throw NumericError("matrix exponential overflow");
  return result;
}

ExpComparisonReport exp_comparison_report(const CMatrix& m, double tau, double horizon,
                                          std::span<const double> grid) {
  require_positive_delay(tau);
  const double norm = frobenius_norm(m);
  if (norm > 1.0 + 1e-12) {
    throw DomainError("operator norm estimate exceeds 1; the comparison bound requires ||M|| <= 1");
  }
  CMatrix neg = m;
  neg *= Complex{-1.0, 0.0};
  DelayedExpEvaluator exp_tau(neg, tau);

  ExpComparisonReport report;
  report.bound = tau * std::exp(horizon);
  for (double t : grid) {
    if (t < 0.0 || t > horizon) throw InputError("comparison grid point outside [0, T]");
    const CMatrix gap = exp_tau(t - tau) - classical_exp_matrix(neg, t);
    report.max_gap = std::max(report.max_gap, frobenius_norm(gap));
  }
  report.satisfied = report.max_gap <= report.bound;

  // Piecewise increment bound: the term added on (k tau, (k+1) tau] has norm
  // at most tau^{k+1}/(k+1)! when ||M|| <= 1.
  const long pieces = std::min(series_terms(tau, horizon), 16L);
  for (long k = 1; k <= pieces; ++k) {
    for (int j = 1; j <= 8; ++j) {
      const double t = (static_cast<double>(k) + static_cast<double>(j) / 8.0) * tau;
      if (t > horizon) break;
      const double inc = frobenius_norm(exp_tau.piece_increment(t));
      const double piece_bound = power_over_factorial(tau, static_cast<long>(k) + 1);
      if (piece_bound > 0.0) {
        report.max_step_ratio = std::max(report.max_step_ratio, inc / piece_bound);
      }
    }
  }
  report.step_bound_satisfied = report.max_step_ratio <= 1.0 + 1e-12;
  return report;
}

}  // namespace delaytherm
