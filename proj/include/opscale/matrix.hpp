#pragma once

#include <initializer_list>
#include <vector>

#include "opscale/errors.hpp"
#include "opscale/rational.hpp"

namespace opscale {

// Dense row-major matrix over an exact (Rational) or floating (double) scalar.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
    data_.assign(static_cast<std::size_t>(rows) * cols, T(0));
  }
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = static_cast<int>(init.size());
    cols_ = rows_ ? static_cast<int>(init.begin()->size()) : 0;
    data_.reserve(static_cast<std::size_t>(rows_) * cols_);
    for (const auto& row : init) {
      if (static_cast<int>(row.size()) != cols_)
        throw DimensionError("ragged initializer");
      for (const auto& v : row) data_.push_back(v);
    }
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  Matrix transpose() const {
    Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  T trace() const {
    require_square("trace");
    T s(0);
    for (int i = 0; i < rows_; ++i) s += (*this)(i, i);
    return s;
  }

  bool is_symmetric() const {
    if (!is_square()) return false;
    for (int i = 0; i < rows_; ++i)
      for (int j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  bool is_zero() const {
    for (const auto& v : data_)
      if (v != T(0)) return false;
    return true;
  }

  Matrix operator+(const Matrix& o) const {
    require_same_shape(o, "+");
    Matrix out(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] + o.data_[k];
    return out;
  }
  Matrix operator-(const Matrix& o) const {
    require_same_shape(o, "-");
    Matrix out(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] - o.data_[k];
    return out;
  }
  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw DimensionError("matrix product shape mismatch");
    Matrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
      for (int k = 0; k < cols_; ++k) {
        const T& a = (*this)(i, k);
        if (a == T(0)) continue;
        for (int j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
      }
    }
    return out;
  }
  Matrix operator*(const T& s) const {
    Matrix out(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] * s;
    return out;
  }
  Matrix operator-() const {
    Matrix out(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = -data_[k];
    return out;
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  void require_square(const char* op) const {
    if (!is_square())
      throw DimensionError(std::string(op) + " requires a square matrix");
  }

 private:
  void require_same_shape(const Matrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionError(std::string("shape mismatch in matrix ") + op);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using QMat = Matrix<Rational>;
using DMat = Matrix<double>;

DMat to_double(const QMat& a);
QMat to_exact(const DMat& a);  // exact: double entries are dyadic

// Exact determinant. Rows are scaled to integers, then Bareiss fraction-free
// elimination keeps every intermediate an integer, which avoids the
// denominator churn of naive rational elimination.
Rational det(const QMat& a);
double det(const DMat& a);  // partial-pivot LU, independent of the exact path

// Exact inverse via Gauss-Jordan. Throws SingularMatrixError (with the pivot
// column) when elimination certifies a zero pivot.
QMat invert(const QMat& a);
DMat invert(const DMat& a);

int rank(const QMat& a);

template <typename T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const T& s = a(i, j);
      if (s == T(0)) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
    }
  return out;
}

// Entrywise truncation toward zero at 2^-bits resolution.
QMat truncate_entries(const QMat& a, unsigned bits);

// LDL^T factorization of a symmetric matrix, pivot-free. For positive
// definite input all pivots are positive; the first non-positive (or zero)
// pivot aborts the factorization and is reported. No square roots, so the
// factorization stays exact over the rationals.
template <typename T>
struct LdlFactorization {
  Matrix<T> unit_lower;   // L, unit diagonal
  std::vector<T> pivots;  // D
  bool positive_definite = false;
  int failure_index = -1;  // column of the offending pivot, -1 if none

  T determinant() const {
    T d(1);
    for (const auto& p : pivots) d *= p;
    return d;
  }

  // (L D L^T)^{-1}; only meaningful when the factorization completed.
  Matrix<T> inverse() const {
    const int n = unit_lower.rows();
    // Solve L Y = I by forward substitution, then scale by D^{-1} and apply
    // L^{-T}: A^{-1} = L^{-T} D^{-1} L^{-1}.
    Matrix<T> linv = Matrix<T>::identity(n);
    for (int j = 0; j < n; ++j) {
      for (int i = j + 1; i < n; ++i) {
        T s(0);
        for (int k = j; k < i; ++k) s += unit_lower(i, k) * linv(k, j);
        linv(i, j) = -s;
      }
    }
    Matrix<T> out(n, n);
    // out = linv^T * D^{-1} * linv, using symmetry to halve the work.
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        T s(0);
        for (int k = (i > j ? i : j); k < n; ++k)
          s += linv(k, i) * linv(k, j) / pivots[k];
        out(i, j) = s;
        out(j, i) = s;
      }
    }
    return out;
  }
};

template <typename T>
LdlFactorization<T> ldl_factor(const Matrix<T>& a) {
  a.require_square("ldl_factor");
  const int n = a.rows();
  LdlFactorization<T> f;
  f.unit_lower = Matrix<T>::identity(n);
  f.pivots.assign(n, T(0));
  for (int j = 0; j < n; ++j) {
    T d = a(j, j);
    for (int k = 0; k < j; ++k)
      d -= f.unit_lower(j, k) * f.unit_lower(j, k) * f.pivots[k];
    if (!(d > T(0))) {
      f.positive_definite = false;
      f.failure_index = j;
      return f;
    }
    f.pivots[j] = d;
    for (int i = j + 1; i < n; ++i) {
      T v = a(i, j);
      for (int k = 0; k < j; ++k)
        v -= f.unit_lower(i, k) * f.unit_lower(j, k) * f.pivots[k];
      f.unit_lower(i, j) = v / d;
    }
  }
  f.positive_definite = true;
  return f;
}

bool is_positive_definite(const QMat& a);

// tr[(A - I)^2] for square A; the doubly-stochastic defect building block.
template <typename T>
T trace_sq_deviation(const Matrix<T>& a) {
  a.require_square("trace_sq_deviation");
  const int n = a.rows();
  T s(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T d = a(i, j);
      if (i == j) d -= T(1);
      T e = a(j, i);
      if (i == j) e -= T(1);
      s += d * e;
    }
  return s;
}

double max_abs(const DMat& a);
Rational max_abs(const QMat& a);

}  // namespace opscale
