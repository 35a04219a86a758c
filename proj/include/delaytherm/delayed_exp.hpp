#pragma once

#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "delaytherm/linalg.hpp"

namespace delaytherm {

/// Delayed exponential of a complex scalar: zero for t < -tau, one on
/// [-tau, 0], and the finite polynomial sum
///   1 + sum_{k=1}^{floor(t/tau)+1} (t - (k-1) tau)^k lambda^k / k!
/// on each later interval. Terms are summed in ascending k with
/// compensated accumulation.
Complex delayed_exp_scalar(Complex lambda, double tau, double t);

/// Evaluates exp_tau(M, t) for a square complex matrix M by the direct
/// finite series. Powers of M are cached and extended monotonically, so
/// repeated evaluation at growing t reuses earlier work; the visible result
/// does not depend on the cache state.
class DelayedExpEvaluator {
public:
  DelayedExpEvaluator(CMatrix operand, double tau);

  const CMatrix& operand() const { return operand_; }
  double delay() const { return tau_; }
  std::size_t dim() const { return operand_.rows(); }

  /// exp_tau(M, t).
  CMatrix operator()(double t) const;

  /// The term added on the piece containing t, i.e. the difference between
  /// the active polynomial piece and the continuation of the previous one:
  /// (t - k tau)^{k+1} M^{k+1} / (k+1)! for t in (k tau, (k+1) tau].
  CMatrix piece_increment(double t) const;

private:
  const CMatrix& power(std::size_t k) const;

  CMatrix operand_;
  double tau_;
  // Deque keeps references to finished powers valid while the cache grows.
  mutable std::deque<CMatrix> powers_;
  mutable std::mutex cache_mutex_;
};

/// One-shot direct-series evaluation (builds a transient evaluator).
CMatrix delayed_exp_matrix_direct(const CMatrix& m, double tau, double t);

/// exp_tau(S D S^-1, t) = S diag(exp_tau(lambda_i, t)) S^-1 for a
/// diagonalizable operand given by its eigen-decomposition.
/// Throws InputError when S_inv is not an inverse of S within tolerance.
CMatrix delayed_exp_matrix_diag(const CMatrix& s, std::span<const Complex> eigenvalues,
                                const CMatrix& s_inv, double tau, double t);

/// Classical matrix exponential exp(M t) by scaling and squaring of the
/// truncated power series. Throws NumericError when the result overflows.
CMatrix classical_exp_matrix(const CMatrix& m, double t);

/// Comparison of exp_tau(-M, t - tau) against exp(-M t) over a time grid,
/// for operators with norm at most one.
struct ExpComparisonReport {
  double max_gap = 0.0;        // max over grid of ||exp_tau(-M, t-tau) - exp(-M t)||_F
  double bound = 0.0;          // tau * e^T
  bool satisfied = false;      // max_gap <= bound
  double max_step_ratio = 0.0; // max over pieces of ||piece increment|| / (tau^{k+1}/(k+1)!)
  bool step_bound_satisfied = false;
};

/// Throws DomainError when the Frobenius norm of M exceeds one (the bound's
/// working hypothesis), or when tau <= 0.
ExpComparisonReport exp_comparison_report(const CMatrix& m, double tau, double horizon,
                                          std::span<const double> grid);

}  // namespace delaytherm
