#include "opscale/matrix_scaling.hpp"

#include <cmath>

namespace opscale {

NonnegMatrix::NonnegMatrix(QMat m) : entries(std::move(m)) {
  entries.require_square("NonnegMatrix");
  for (const auto& v : entries.data())
    if (v < 0) throw PreconditionError("NonnegMatrix: negative entry");
}

bool NonnegMatrix::has_zero_line() const {
  const int n = entries.rows();
  for (int i = 0; i < n; ++i) {
    bool row = false, col = false;
    for (int j = 0; j < n; ++j) {
      if (entries(i, j) != 0) row = true;
      if (entries(j, i) != 0) col = true;
    }
    if (!row || !col) return true;
  }
  return false;
}

namespace {

// ds(A) against 1/n, computed in the scalar's own arithmetic.
template <typename T>
T ds_value(const Matrix<T>& a) {
  const int n = a.rows();
  T total(0);
  for (int i = 0; i < n; ++i) {
    T rs(0), cs(0);
    for (int j = 0; j < n; ++j) {
      rs += a(i, j);
      cs += a(j, i);
    }
    total += (rs - T(1)) * (rs - T(1)) + (cs - T(1)) * (cs - T(1));
  }
  return total;
}

template <typename T>
SinkhornResult<T> sinkhorn_impl(Matrix<T> m, std::uint64_t steps,
                                bool stop_at_threshold) {
  const int n = m.rows();
  SinkhornResult<T> out;
  const T inv_n = T(1) / T(n);
  for (std::uint64_t s = 1; s <= steps; ++s) {
    const bool row_step = (s % 2) == 1;
    for (int i = 0; i < n; ++i) {
      T sum(0);
      for (int j = 0; j < n; ++j) sum += row_step ? m(i, j) : m(j, i);
      if (sum == T(0))
        throw PreconditionError("sinkhorn_scale: zero line encountered");
      for (int j = 0; j < n; ++j) {
        if (row_step)
          m(i, j) /= sum;
        else
          m(j, i) /= sum;
      }
    }
    T d = ds_value(m);
    out.ds_trace.push_back(d);
    if (!out.first_below && d < inv_n) {
      out.first_below = s;
      if (stop_at_threshold) break;
    }
  }
  out.scaled = std::move(m);
  return out;
}

}  // namespace

SinkhornResult<Rational> sinkhorn_scale(const NonnegMatrix& a,
                                        std::uint64_t steps,
                                        bool stop_at_threshold) {
  if (a.has_zero_line())
    throw PreconditionError("sinkhorn_scale: input has a zero row or column");
  return sinkhorn_impl<Rational>(a.entries, steps, stop_at_threshold);
}

SinkhornResult<double> sinkhorn_scale_float(const DMat& a, std::uint64_t steps,
                                            bool stop_at_threshold) {
  a.require_square("sinkhorn_scale_float");
  return sinkhorn_impl<double>(a, steps, stop_at_threshold);
}

std::uint64_t sinkhorn_iteration_bound(const NonnegMatrix& a) {
  const int n = a.n();
  Rational total(0);
  for (const auto& v : a.entries.data()) total += v;
  double sum = to_double(total);
  if (sum < 1.0) sum = 1.0;
  double t =
      2.0 + 6.0 * n * (n * std::log(static_cast<double>(n)) + std::log(sum));
  return static_cast<std::uint64_t>(std::ceil(t));
}

bool permanent_positive(const NonnegMatrix& a,
                        std::optional<std::uint64_t> budget) {
  if (a.n() == 0) return true;  // empty product convention
  if (a.has_zero_line()) return false;
  // Integerize: positivity of the permanent is scale invariant.
  Integer lcm_all(1);
  for (const auto& v : a.entries.data())
    mpz_lcm(lcm_all.get_mpz_t(), lcm_all.get_mpz_t(), v.get_den().get_mpz_t());
  QMat m = a.entries * Rational(lcm_all);
  NonnegMatrix integral(m);
  std::uint64_t steps = budget.value_or(sinkhorn_iteration_bound(integral));

  // Scale with entries truncated to a fixed dyadic grid instead of exact
  // rationals: matrices that stay far from doubly stochastic mix their
  // denominators so fast that exact entries reach millions of bits within a
  // few dozen steps. Truncation toward zero never enlarges the support, and
  // a zero permanent is a support property (a crossing ds < 1/n rules out
  // the Frobenius-Konig zero block for the truncated matrix, hence for the
  // input), so every positive verdict below remains exactly certified. The
  // budget is generous enough that the 2^-kTruncBits drift cannot starve a
  // positive instance of its crossing.
  constexpr unsigned kTruncBits = 512;
  const int n = integral.n();
  QMat cur = integral.entries;
  const Rational inv_n(1, n);
  for (std::uint64_t s = 1; s <= steps; ++s) {
    const bool row_step = (s % 2) == 1;
    for (int i = 0; i < n; ++i) {
      Rational sum(0);
      for (int j = 0; j < n; ++j) sum += row_step ? cur(i, j) : cur(j, i);
      if (sum == 0) return false;  // a line starved below the grid: diverging
      for (int j = 0; j < n; ++j) {
        if (row_step)
          cur(i, j) /= sum;
        else
          cur(j, i) /= sum;
      }
    }
    cur = truncate_entries(cur, kTruncBits);
    Rational ds(0);
    for (int i = 0; i < n; ++i) {
      Rational rs(0), cs(0);
      for (int j = 0; j < n; ++j) {
        rs += cur(i, j);
        cs += cur(j, i);
      }
      ds += (rs - 1) * (rs - 1) + (cs - 1) * (cs - 1);
    }
    if (ds < inv_n) return true;
  }
  return false;
}

}  // namespace opscale
