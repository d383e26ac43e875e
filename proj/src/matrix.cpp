#include "opscale/matrix.hpp"

#include <cmath>
#include <cstdlib>

namespace opscale {

DMat to_double(const QMat& a) {
  DMat out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = to_double(a(i, j));
  return out;
}

QMat to_exact(const DMat& a) {
  QMat out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = from_double(a(i, j));
  return out;
}

Rational det(const QMat& a) {
  a.require_square("det");
  const int n = a.rows();
  if (n == 0) return Rational(1);

  // Clear denominators row by row; det picks up the product of the scalers.
  std::vector<std::vector<Integer>> m(n, std::vector<Integer>(n));
  Integer scale(1);
  for (int i = 0; i < n; ++i) {
    Integer row_lcm(1);
    for (int j = 0; j < n; ++j)
      mpz_lcm(row_lcm.get_mpz_t(), row_lcm.get_mpz_t(),
              a(i, j).get_den().get_mpz_t());
    for (int j = 0; j < n; ++j) {
      Rational v = a(i, j) * Rational(row_lcm);
      m[i][j] = v.get_num();  // denominator is 1 after scaling
    }
    scale *= row_lcm;
  }

  // Bareiss: every division below is exact over the integers.
  int sign = 1;
  Integer prev(1);
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (m[i][k] != 0) {
          p = i;
          break;
        }
      if (p < 0) return Rational(0);
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        Integer t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  Rational out(sign > 0 ? m[n - 1][n - 1] : Integer(-m[n - 1][n - 1]), scale);
  out.canonicalize();
  return out;
}

double det(const DMat& a) {
  a.require_square("det");
  const int n = a.rows();
  if (n == 0) return 1.0;
  DMat m = a;
  double out = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(p, k))) p = i;
    if (m(p, k) == 0.0) return 0.0;
    if (p != k) {
      for (int j = k; j < n; ++j) std::swap(m(k, j), m(p, j));
      out = -out;
    }
    out *= m(k, k);
    for (int i = k + 1; i < n; ++i) {
      double f = m(i, k) / m(k, k);
      for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return out;
}

QMat invert(const QMat& a) {
  a.require_square("invert");
  const int n = a.rows();
  QMat m = a;
  QMat inv = QMat::identity(n);
  for (int k = 0; k < n; ++k) {
    int p = -1;
    for (int i = k; i < n; ++i)
      if (m(i, k) != 0) {
        p = i;
        break;
      }
    if (p < 0)
      throw SingularMatrixError("singular matrix: zero pivot in column " +
                                    std::to_string(k),
                                k);
    if (p != k)
      for (int j = 0; j < n; ++j) {
        std::swap(m(k, j), m(p, j));
        std::swap(inv(k, j), inv(p, j));
      }
    Rational piv = m(k, k);
    for (int j = 0; j < n; ++j) {
      m(k, j) /= piv;
      inv(k, j) /= piv;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      Rational f = m(i, k);
      if (f == 0) continue;
      for (int j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

DMat invert(const DMat& a) {
  a.require_square("invert");
  const int n = a.rows();
  DMat m = a;
  DMat inv = DMat::identity(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(p, k))) p = i;
    if (m(p, k) == 0.0)
      throw SingularMatrixError("singular matrix (float): zero pivot in column " +
                                    std::to_string(k),
                                k);
    if (p != k)
      for (int j = 0; j < n; ++j) {
        std::swap(m(k, j), m(p, j));
        std::swap(inv(k, j), inv(p, j));
      }
    double piv = m(k, k);
    for (int j = 0; j < n; ++j) {
      m(k, j) /= piv;
      inv(k, j) /= piv;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      double f = m(i, k);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

int rank(const QMat& a) {
  QMat m = a;
  const int rows = m.rows(), cols = m.cols();
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (m(i, c) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < cols; ++j) std::swap(m(r, j), m(p, j));
    Rational piv = m(r, c);
    for (int i = r + 1; i < rows; ++i) {
      if (m(i, c) == 0) continue;
      Rational f = m(i, c) / piv;
      for (int j = c; j < cols; ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

QMat truncate_entries(const QMat& a, unsigned bits) {
  QMat out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out(i, j) = truncate_toward_zero(a(i, j), bits);
  return out;
}

bool is_positive_definite(const QMat& a) {
  if (!a.is_symmetric()) return false;
  return ldl_factor(a).positive_definite;
}

double max_abs(const DMat& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::fabs(v));
  return m;
}

Rational max_abs(const QMat& a) {
  Rational m(0);
  for (const auto& v : a.data()) {
    Rational av = v < 0 ? Rational(-v) : v;
    if (av > m) m = av;
  }
  return m;
}

}  // namespace opscale
