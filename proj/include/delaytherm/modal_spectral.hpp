#pragma once

#include <array>
#include <cstddef>

#include "delaytherm/core_model.hpp"
#include "delaytherm/linalg.hpp"

namespace delaytherm {

/// nu_n = pi n / l. Throws DomainError for l <= 0.
double wavenumber(std::size_t n, double l);

/// Trigonometric basis of the first-order system, normalized per mode to
/// unit X norm under the weighted inner product with weights (1, a, b/d).
/// Mode n >= 1 has shape (sin, cos, cos) of nu_n x with one shared scale;
/// mode 0 is (0, const, const).
class Basis {
public:
  Basis(double l, const DerivedCoefficients& coeffs);

  double length() const { return l_; }

  /// Values of the three components of mode n at position x.
  /// Throws DomainError when x lies outside [0, l].
  std::array<double, 3> eval(std::size_t n, double x) const;

  /// Shared normalization scale of mode n (component 0 scale is meaningless
  /// for n = 0 where the first component vanishes identically).
  double scale(std::size_t n) const;

  /// Plain L2 norms squared of the three component functions.
  std::array<double, 3> component_norms_sq(std::size_t n) const;

  /// Per-mode coefficient weights w_k ||phi_n^k||^2 (sum to one); the X norm
  /// of a field is the sum over modes of the weighted squared coefficients.
  std::array<double, 3> mode_weights(std::size_t n) const;

  /// Inner-product weights (1, a, b/d).
  std::array<double, 3> component_weights() const { return {1.0, weight2_, weight3_}; }

private:
  double l_;
  double weight2_;  // a
  double weight3_;  // b/d
  double scale_pos_;
  double scale_zero_;
};

/// Modal representation of the differential operator on mode n:
/// rows ((0, a nu, -b nu), (-nu, 0, 0), (d nu, 0, c nu^2)).
CMatrix modal_matrix(std::size_t n, const DerivedCoefficients& coeffs, double l);

/// Closed-form eigenvalues of the modal matrix via the trigonometric-free
/// cubic root formula with principal complex branches; falls back to the
/// companion-matrix oracle when the intermediate C degenerates.
/// n = 0 yields (0, 0, 0).
std::array<Complex, 3> cubic_eigenvalues(std::size_t n, const DerivedCoefficients& coeffs,
                                         double l);

/// Roots of the monic cubic mu^3 + c2 mu^2 + c1 mu + c0 as eigenvalues of
/// the companion matrix, computed by shifted QR iteration.
std::array<Complex, 3> companion_roots_oracle(Complex c2, Complex c1, Complex c0);

/// Eigenvector of the modal matrix for eigenvalue mu. Closed form
/// (-b nu mu, b nu^2, a nu^2 + mu^2) when nondegenerate, null-space
/// extraction otherwise; unit Euclidean norm. For n = 0 returns the
/// standard basis vector of the given index.
/// Throws NumericError when the residual stays above 1e-8 ||B_n||.
CVector eigenvector(Complex mu, std::size_t n, const DerivedCoefficients& coeffs, double l,
                    std::size_t zero_mode_axis = 0);

/// Eigen-structure of one mode.
struct ModalSystem {
  std::size_t n = 0;
  double nu = 0.0;
  CMatrix B;                             // 3x3 modal matrix
  std::array<Complex, 3> eigenvalues{};  // sorted by (Re, Im) ascending
  CMatrix S;                             // eigenvectors as columns
  CMatrix S_inv;                         // adjugate-formula inverse
  std::array<Complex, 3> D{};            // diagonal (same order as S columns)
  bool diagonalizable = false;
  double cond_S = 0.0;
};

/// Builds eigenvalues, eigenvectors, S, S_inv and the diagonalizable flag
/// for one mode. The flag is false (and downstream evaluation uses the
/// direct series) when eigenvalues nearly collide or S is nearly singular.
ModalSystem build_modal_system(std::size_t n, const DerivedCoefficients& coeffs, double l);

/// 3x3 inverse by the adjugate-over-determinant formula.
CMatrix adjugate_inverse_3(const CMatrix& m);

}  // namespace delaytherm
