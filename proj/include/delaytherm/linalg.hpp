#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace delaytherm {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Dense complex matrix, row-major. Sized for the small operators this
/// library works with (d <= ~8); not meant for large linear algebra.
class CMatrix {
public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, Complex{0.0, 0.0}) {}
  /// Row-major construction from nested initializer lists.
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix zero(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::span<const Complex> data() const { return a_; }
  std::span<Complex> data() { return a_; }

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex s);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> a_;
};

CMatrix operator+(CMatrix lhs, const CMatrix& rhs);
CMatrix operator-(CMatrix lhs, const CMatrix& rhs);
CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);
CMatrix operator*(Complex s, CMatrix m);
CVector operator*(const CMatrix& m, const CVector& v);

double frobenius_norm(const CMatrix& m);
double max_abs(const CMatrix& m);
bool all_finite(const CMatrix& m);
bool all_finite(std::span<const Complex> v);

double vector_norm(std::span<const Complex> v);
CVector operator+(CVector lhs, const CVector& rhs);
CVector operator-(CVector lhs, const CVector& rhs);
CVector operator*(Complex s, CVector v);

/// Neumaier compensated accumulator for one double.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Entrywise compensated accumulation of complex matrices.
class CompensatedMatrixSum {
public:
  explicit CompensatedMatrixSum(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), re_(rows * cols), im_(rows * cols) {}
  void add(const CMatrix& m);
  CMatrix value() const;

private:
  std::size_t rows_, cols_;
  std::vector<CompensatedSum> re_, im_;
};

/// Inverse by Gauss-Jordan elimination with partial pivoting.
/// Throws NumericError on a (numerically) singular pivot.
CMatrix gauss_inverse(const CMatrix& m);

/// All eigenvalues of a small dense complex matrix by Hessenberg reduction
/// followed by shifted QR iteration with deflation.
/// Throws NumericError if a block fails to deflate within the iteration cap.
CVector qr_eigenvalues(CMatrix a, std::size_t max_sweeps_per_eig = 80);

/// Unit-norm null vector of a (near-)singular square matrix, found by
/// full-pivot row reduction. Intended for small d.
CVector null_space_vector(CMatrix a);

/// kappa(S) estimated as ||S||_F * ||S^-1||_F.
double condition_estimate(const CMatrix& s, const CMatrix& s_inv);

}  // namespace delaytherm
