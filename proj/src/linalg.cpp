#include "delaytherm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "delaytherm/errors.hpp"

namespace delaytherm {

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows.begin() == rows.end() ? 0 : rows.begin()->size();
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("ragged matrix initializer");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::zero(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InputError("matrix shape mismatch in +");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InputError("matrix shape mismatch in -");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& x : a_) x *= s;
  return *this;
}

CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) throw InputError("matrix shape mismatch in *");
  CMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const Complex lik = lhs(i, k);
      if (lik == Complex{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += lik * rhs(k, j);
    }
  }
  return out;
}

CMatrix operator*(Complex s, CMatrix m) { return m *= s; }

CVector operator*(const CMatrix& m, const CVector& v) {
  if (m.cols() != v.size()) throw InputError("matrix/vector shape mismatch");
  CVector out(m.rows(), Complex{0.0, 0.0});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

double frobenius_norm(const CMatrix& m) {
  double s = 0.0;
  for (const auto& x : m.data()) s += std::norm(x);
  return std::sqrt(s);
}

double max_abs(const CMatrix& m) {
  double s = 0.0;
  for (const auto& x : m.data()) s = std::max(s, std::abs(x));
  return s;
}

bool all_finite(const CMatrix& m) { return all_finite(m.data()); }

bool all_finite(std::span<const Complex> v) {
  for (const auto& x : v) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  }
  return true;
}

double vector_norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

CVector operator+(CVector lhs, const CVector& rhs) {
  if (lhs.size() != rhs.size()) throw InputError("vector size mismatch in +");
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] += rhs[i];
  return lhs;
}

CVector operator-(CVector lhs, const CVector& rhs) {
  if (lhs.size() != rhs.size()) throw InputError("vector size mismatch in -");
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= rhs[i];
  return lhs;
}

CVector operator*(Complex s, CVector v) {
  for (auto& x : v) x *= s;
  return v;
}

void CompensatedMatrixSum::add(const CMatrix& m) {
  if (m.rows() != rows_ || m.cols() != cols_) throw InputError("matrix shape mismatch in accumulation");
  const auto d = m.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    re_[i].add(d[i].real());
    im_[i].add(d[i].imag());
  }
}

CMatrix CompensatedMatrixSum::value() const {
  CMatrix out(rows_, cols_);
  auto d = out.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = Complex{re_[i].value(), im_[i].value()};
  return out;
}

CMatrix gauss_inverse(const CMatrix& m) {
  if (!m.square()) throw InputError("inverse of non-square matrix");
  const std::size_t n = m.rows();
  CMatrix a = m;
  CMatrix inv = CMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        piv = r;
      }
    }
    if (!(best > 0.0)) throw NumericError("singular matrix in gauss_inverse");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    }
    const Complex d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex f = a(r, col);
      if (f == Complex{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

namespace {

// Eigenvalues of a complex 2x2 block, the root closer to a22 first.
std::pair<Complex, Complex> eig2(Complex a11, Complex a12, Complex a21, Complex a22) {
  const Complex tr = a11 + a22;
  const Complex det = a11 * a22 - a12 * a21;
  const Complex disc = std::sqrt(tr * tr - 4.0 * det);
  Complex r1 = (tr + disc) / 2.0;
  // Avoid cancellation: recover the second root from the product.
  Complex r2;
  if (std::abs(r1) > 0.0) {
    r2 = det / r1;
  } else {
    r2 = (tr - disc) / 2.0;
  }
  if (std::abs(r1 - a22) > std::abs(r2 - a22)) std::swap(r1, r2);
  return {r1, r2};
}

void hessenberg_reduce(CMatrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    // Householder vector annihilating a(k+2.., k).
    double scale = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) scale += std::norm(a(i, k));
    scale = std::sqrt(scale);
    if (scale == 0.0) continue;
    const Complex x0 = a(k + 1, k);
    const double ax0 = std::abs(x0);
    const Complex phase = ax0 > 0.0 ? x0 / ax0 : Complex{1.0, 0.0};
    const Complex alpha = -phase * scale;
    CVector v(n, Complex{0.0, 0.0});
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    // A <- (I - 2 v v* / v*v) A (I - 2 v v* / v*v)
    for (std::size_t j = 0; j < n; ++j) {
      Complex dot{0.0, 0.0};
      for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * a(i, j);
      dot *= 2.0 / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= dot * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      Complex dot{0.0, 0.0};
      for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
      dot *= 2.0 / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= dot * std::conj(v[j]);
    }
  }
}

}  // namespace

CVector qr_eigenvalues(CMatrix a, std::size_t max_sweeps_per_eig) {
  if (!a.square()) throw InputError("eigenvalues of non-square matrix");
  const std::size_t n = a.rows();
  CVector eig;
  eig.reserve(n);
  if (n == 0) return eig;
  hessenberg_reduce(a);

  const double anorm = std::max(frobenius_norm(a), 1e-300);
  const double eps = 1e-16;
  std::size_t hi = n - 1;
  std::size_t sweeps = 0;
  std::size_t stalled = 0;
  const std::size_t cap = max_sweeps_per_eig * n;

  while (true) {
    // Deflate converged trailing entries.
    while (hi > 0) {
      const double off = std::abs(a(hi, hi - 1));
      const double diag = std::abs(a(hi - 1, hi - 1)) + std::abs(a(hi, hi));
      if (off <= eps * (diag > 0.0 ? diag : anorm)) {
        eig.push_back(a(hi, hi));
        --hi;
        stalled = 0;
      } else {
        break;
      }
    }
    if (hi == 0) {
      eig.push_back(a(0, 0));
      break;
    }
    if (++sweeps > cap) throw NumericError("QR eigenvalue iteration did not converge");

    // Wilkinson shift from the trailing 2x2 of the active block; an
    // exceptional shift breaks symmetric cycling (e.g. roots of unity).
    Complex mu;
    if (++stalled % 12 == 0) {
      mu = a(hi, hi) + Complex{0.75 * std::abs(a(hi, hi - 1)), 0.4375 * std::abs(a(hi, hi - 1))};
    } else {
      const auto [m1, m2] = eig2(a(hi - 1, hi - 1), a(hi - 1, hi), a(hi, hi - 1), a(hi, hi));
      (void)m2;
      mu = m1;
    }

    // Explicit shifted QR step on the active block 0..hi:
    // A - mu I = QR (Givens), then A <- RQ + mu I.
    const std::size_t m = hi + 1;
    for (std::size_t k = 0; k < m; ++k) a(k, k) -= mu;
    std::vector<Complex> cs(m - 1), sn(m - 1);
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const Complex x = a(k, k);
      const Complex y = a(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      Complex c{1.0, 0.0}, s{0.0, 0.0};
      if (r > 0.0) {
        c = std::conj(x) / r;
        s = std::conj(y) / r;
      }
      cs[k] = c;
      sn[k] = s;
      for (std::size_t j = k; j < m; ++j) {
        const Complex t1 = a(k, j), t2 = a(k + 1, j);
        a(k, j) = c * t1 + s * t2;
        a(k + 1, j) = -std::conj(s) * t1 + std::conj(c) * t2;
      }
      a(k + 1, k) = 0.0;
    }
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const Complex c = cs[k], s = sn[k];
      const std::size_t rmax = std::min(m, k + 2);
      for (std::size_t i = 0; i <= rmax && i < m; ++i) {
        const Complex t1 = a(i, k), t2 = a(i, k + 1);
        a(i, k) = t1 * std::conj(c) + t2 * std::conj(s);
        a(i, k + 1) = -t1 * s + t2 * c;
      }
    }
    for (std::size_t k = 0; k < m; ++k) a(k, k) += mu;
  }
  return eig;
}

CVector null_space_vector(CMatrix a) {
  if (!a.square()) throw InputError("null_space_vector expects a square matrix");
  const std::size_t n = a.rows();
  std::vector<std::size_t> col_of(n);
  for (std::size_t j = 0; j < n; ++j) col_of[j] = j;

  // Full-pivot elimination, stopping before the last (most singular) pivot.
  std::size_t rank = 0;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t pi = step, pj = step;
    double best = 0.0;
    for (std::size_t i = step; i < n; ++i) {
      for (std::size_t j = step; j < n; ++j) {
        if (std::abs(a(i, j)) > best) {
          best = std::abs(a(i, j));
          pi = i;
          pj = j;
        }
      }
    }
    if (best == 0.0) break;
    if (pi != step) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(pi, j), a(step, j));
    }
    if (pj != step) {
      for (std::size_t i = 0; i < n; ++i) std::swap(a(i, pj), a(i, step));
      std::swap(col_of[pj], col_of[step]);
    }
    for (std::size_t i = step + 1; i < n; ++i) {
      const Complex f = a(i, step) / a(step, step);
      a(i, step) = 0.0;
      for (std::size_t j = step + 1; j < n; ++j) a(i, j) -= f * a(step, j);
    }
    ++rank;
  }

  // Free variable = last permuted column; back substitute through the rank rows.
  CVector y(n, Complex{0.0, 0.0});
  y[n - 1] = 1.0;
  for (std::size_t ii = rank; ii-- > 0;) {
    Complex acc{0.0, 0.0};
    for (std::size_t j = ii + 1; j < n; ++j) acc += a(ii, j) * y[j];
    y[ii] = std::abs(a(ii, ii)) > 0.0 ? -acc / a(ii, ii) : Complex{0.0, 0.0};
  }
  CVector v(n, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) v[col_of[j]] = y[j];
  const double nv = vector_norm(v);
  if (!(nv > 0.0)) throw NumericError("null space extraction failed");
  for (auto& x : v) x /= nv;
  return v;
}

double condition_estimate(const CMatrix& s, const CMatrix& s_inv) {
  return frobenius_norm(s) * frobenius_norm(s_inv);
}

}  // namespace delaytherm
