#include "delaytherm/modal_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace delaytherm {

double wavenumber(std::size_t n, double l) {
  if (!(l > 0.0)) throw DomainError("interval length must be > 0");
  return std::numbers::pi * static_cast<double>(n) / l;
}

Basis::Basis(double l, const DerivedCoefficients& coeffs) : l_(l) {
  if (!(l > 0.0)) throw DomainError("interval length must be > 0");
  if (!(coeffs.a > 0.0) || !(coeffs.b > 0.0) || !(coeffs.d > 0.0)) {
    throw DomainError("basis weights require positive coefficients");
  }
  weight2_ = coeffs.a;
  weight3_ = coeffs.b / coeffs.d;
  // Unit X norm: modes n >= 1 integrate sin^2 and cos^2 to l/2 per component,
  // mode 0 has two constant components integrating to l.
  scale_pos_ = std::sqrt(2.0 / (l_ * (1.0 + weight2_ + weight3_)));
  scale_zero_ = std::sqrt(1.0 / (l_ * (weight2_ + weight3_)));
}

std::array<double, 3> Basis::eval(std::size_t n, double x) const {
  if (x < 0.0 || x > l_) throw DomainError("position outside [0, l]");
  if (n == 0) return {0.0, scale_zero_, scale_zero_};
  const double nu = wavenumber(n, l_);
  const double s = std::sin(nu * x);
  const double c = std::cos(nu * x);
  return {scale_pos_ * s, scale_pos_ * c, scale_pos_ * c};
}

double Basis::scale(std::size_t n) const { return n == 0 ? scale_zero_ : scale_pos_; }

std::array<double, 3> Basis::component_norms_sq(std::size_t n) const {
  if (n == 0) {
    const double v = scale_zero_ * scale_zero_ * l_;
    return {0.0, v, v};
  }
  const double v = scale_pos_ * scale_pos_ * l_ / 2.0;
  return {v, v, v};
}

std::array<double, 3> Basis::mode_weights(std::size_t n) const {
  const auto nrm = component_norms_sq(n);
  return {nrm[0], weight2_ * nrm[1], weight3_ * nrm[2]};
}

namespace {

// Deterministic (Re, Im) ascending order, with a noise-tolerant real-part
// comparison so that conjugate pairs with roundoff-level real offsets keep
// a stable order.
void sort_eigenvalues(std::array<Complex, 3>& mu) {
  double scale = 0.0;
  for (const auto& m : mu) scale = std::max(scale, std::abs(m));
  const double tol = 1e-9 * (1.0 + scale);
  std::sort(mu.begin(), mu.end(), [tol](Complex x, Complex y) {
    if (std::abs(x.real() - y.real()) > tol) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

}  // namespace

CMatrix modal_matrix(std::size_t n, const DerivedCoefficients& coeffs, double l) {
  const double nu = wavenumber(n, l);
  CMatrix b(3, 3);
  b(0, 1) = coeffs.a * nu;
  b(0, 2) = -coeffs.b * nu;
  b(1, 0) = -nu;
  b(2, 0) = coeffs.d * nu;
  b(2, 2) = coeffs.c * nu * nu;
  return b;
}

std::array<Complex, 3> companion_roots_oracle(Complex c2, Complex c1, Complex c0) {
  CMatrix comp(3, 3);
  comp(0, 2) = -c0;
  comp(1, 0) = 1.0;
  comp(1, 2) = -c1;
  comp(2, 1) = 1.0;
  comp(2, 2) = -c2;
  const CVector eig = qr_eigenvalues(comp);
  std::array<Complex, 3> out{eig[0], eig[1], eig[2]};
  sort_eigenvalues(out);
  return out;
}

std::array<Complex, 3> cubic_eigenvalues(std::size_t n, const DerivedCoefficients& coeffs,
                                         double l) {
  if (n == 0) return {Complex{0.0, 0.0}, Complex{0.0, 0.0}, Complex{0.0, 0.0}};
  const double nu = wavenumber(n, l);

  // Characteristic polynomial mu^3 - c nu^2 mu^2 + (a + bd) nu^2 mu - a c nu^4.
  // The discriminant combination cancels badly for large nu, so the formula
  // is evaluated in extended precision and each root gets one Newton step.
  using LComplex = std::complex<long double>;
  const long double nu2 = static_cast<long double>(nu) * static_cast<long double>(nu);
  const long double a = coeffs.a, b = coeffs.b, c = coeffs.c, d = coeffs.d;
  const long double p2 = -c * nu2;                // mu^2 coefficient
  const long double p1 = (a + b * d) * nu2;       // mu^1
  const long double p0 = -a * c * nu2 * nu2;      // mu^0

  const long double delta0 = c * c * nu2 * nu2 - 3.0L * (a + b * d) * nu2;
  const long double delta1 =
      -2.0L * c * c * c * nu2 * nu2 * nu2 + 9.0L * c * (a + b * d) * nu2 * nu2 -
      27.0L * a * c * nu2 * nu2;
  const LComplex root =
      std::sqrt(LComplex{delta1 * delta1 - 4.0L * delta0 * delta0 * delta0, 0.0L});
  const LComplex big_c = std::pow((LComplex{delta1, 0.0L} + root) / 2.0L, 1.0L / 3.0L);

  if (std::abs(big_c) < 1e-12L * std::cbrt(1.0L + std::abs(delta1))) {
    return companion_roots_oracle(Complex{static_cast<double>(p2), 0.0},
                                  Complex{static_cast<double>(p1), 0.0},
                                  Complex{static_cast<double>(p0), 0.0});
  }

  std::array<Complex, 3> mu;
  for (int k = 0; k < 3; ++k) {
    const long double angle = 2.0L * std::numbers::pi_v<long double> * k / 3.0L;
    const LComplex rot{std::cos(angle), std::sin(angle)};
    LComplex m = (LComplex{c * nu2, 0.0L} - big_c * rot -
                  std::conj(rot) * LComplex{delta0, 0.0L} / big_c) /
                 3.0L;
    // Newton polish against the characteristic polynomial.
    for (int it = 0; it < 2; ++it) {
      const LComplex val = ((m + p2) * m + p1) * m + p0;
      const LComplex der = (3.0L * m + 2.0L * p2) * m + p1;
      if (std::abs(der) == 0.0L) break;
      m -= val / der;
    }
    mu[k] = Complex{static_cast<double>(m.real()), static_cast<double>(m.imag())};
  }
  sort_eigenvalues(mu);
  return mu;
}

CVector eigenvector(Complex mu, std::size_t n, const DerivedCoefficients& coeffs, double l,
                    std::size_t zero_mode_axis) {
  if (n == 0) {
    if (zero_mode_axis > 2) throw DomainError("zero-mode axis must be 0, 1 or 2");
    CVector e(3, Complex{0.0, 0.0});
    e[zero_mode_axis] = 1.0;
    return e;
  }
  const double nu = wavenumber(n, l);
  CVector v{-coeffs.b * nu * mu, Complex{coeffs.b * nu * nu, 0.0},
            Complex{coeffs.a * nu * nu, 0.0} + mu * mu};
  const double degenerate_scale = 1e-10 * (1.0 + std::norm(mu) + nu * nu);
  const CMatrix b = modal_matrix(n, coeffs, l);

  if (vector_norm(v) < degenerate_scale) {
    CMatrix shifted = CMatrix::identity(3);
    shifted *= mu;
    shifted -= b;
    v = null_space_vector(shifted);
  }
  const double nv = vector_norm(v);
  for (auto& x : v) x /= nv;

  CVector resid = b * v;
  for (std::size_t i = 0; i < 3; ++i) resid[i] = mu * v[i] - resid[i];
  const double bnorm = frobenius_norm(b);
  if (vector_norm(resid) > 1e-8 * bnorm) {
    throw NumericError("eigenvector residual too large", vector_norm(resid));
  }
  return v;
}

CMatrix adjugate_inverse_3(const CMatrix& m) {
  if (m.rows() != 3 || m.cols() != 3) throw InputError("adjugate inverse expects a 3x3 matrix");
  const Complex det = m(0, 0) * m(1, 1) * m(2, 2) + m(0, 1) * m(1, 2) * m(2, 0) +
                      m(0, 2) * m(1, 0) * m(2, 1) - m(2, 0) * m(1, 1) * m(0, 2) -
                      m(2, 1) * m(1, 2) * m(0, 0) - m(2, 2) * m(1, 0) * m(0, 1);
  if (std::abs(det) == 0.0) throw NumericError("singular matrix in adjugate inverse");
  CMatrix inv(3, 3);
  inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / det;
  inv(0, 1) = (-m(0, 1) * m(2, 2) + m(0, 2) * m(2, 1)) / det;
  inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
  inv(1, 0) = (-m(1, 0) * m(2, 2) + m(1, 2) * m(2, 0)) / det;
  inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
  inv(1, 2) = (-m(0, 0) * m(1, 2) + m(0, 2) * m(1, 0)) / det;
  inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / det;
  inv(2, 1) = (-m(0, 0) * m(2, 1) + m(0, 1) * m(2, 0)) / det;
  inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
  return inv;
}

ModalSystem build_modal_system(std::size_t n, const DerivedCoefficients& coeffs, double l) {
  ModalSystem sys;
  sys.n = n;
  sys.nu = wavenumber(n, l);
  sys.B = modal_matrix(n, coeffs, l);
  sys.eigenvalues = cubic_eigenvalues(n, coeffs, l);
  sys.D = sys.eigenvalues;

  if (n == 0) {
    sys.S = CMatrix::identity(3);
    sys.S_inv = CMatrix::identity(3);
    sys.diagonalizable = true;
    sys.cond_S = 3.0;
    return sys;
  }

  sys.S = CMatrix(3, 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const CVector v = eigenvector(sys.eigenvalues[k], n, coeffs, l);
    for (std::size_t i = 0; i < 3; ++i) sys.S(i, k) = v[i];
  }

  double max_mu = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i) {
    max_mu = std::max(max_mu, std::abs(sys.eigenvalues[i]));
    for (std::size_t j = i + 1; j < 3; ++j) {
      min_gap = std::min(min_gap, std::abs(sys.eigenvalues[i] - sys.eigenvalues[j]));
    }
  }
  const Complex det = sys.S(0, 0) * (sys.S(1, 1) * sys.S(2, 2) - sys.S(1, 2) * sys.S(2, 1)) -
                      sys.S(0, 1) * (sys.S(1, 0) * sys.S(2, 2) - sys.S(1, 2) * sys.S(2, 0)) +
                      sys.S(0, 2) * (sys.S(1, 0) * sys.S(2, 1) - sys.S(1, 1) * sys.S(2, 0));
  const double s_norm = frobenius_norm(sys.S);
  sys.diagonalizable = min_gap >= 1e-8 * (1.0 + max_mu) &&
                       std::abs(det) >= 1e-12 * s_norm * s_norm * s_norm;
  if (sys.diagonalizable) {
    sys.S_inv = adjugate_inverse_3(sys.S);
    sys.cond_S = condition_estimate(sys.S, sys.S_inv);
  } else {
    sys.S_inv = CMatrix::identity(3);
    sys.cond_S = std::numeric_limits<double>::infinity();
  }
  return sys;
}

}  // namespace delaytherm
