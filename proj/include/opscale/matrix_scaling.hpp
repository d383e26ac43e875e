#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "opscale/matrix.hpp"

namespace opscale {

// Square nonnegative matrix for permanent / matching work. Construction
// validates shape and nonnegativity; triviality (a zero row or column) is
// checked separately because scaling cannot begin there.
struct NonnegMatrix {
  QMat entries;

  explicit NonnegMatrix(QMat m);
  int n() const { return entries.rows(); }
  bool has_zero_line() const;  // zero row or zero column
};

template <typename T>
struct SinkhornResult {
  Matrix<T> scaled;
  std::vector<T> ds_trace;  // ds(A) after each normalization step
  std::optional<std::uint64_t> first_below;  // first step with ds < 1/n
};

// t alternating row/column normalizations starting with a row step.
// ds(A) = ||R(A) - I||_F^2 + ||C(A) - I||_F^2 where R(A), C(A) are the
// diagonal matrices of row / column sums. Exact over the rationals; a float
// variant backs the numeric monotonicity tests.
SinkhornResult<Rational> sinkhorn_scale(const NonnegMatrix& a, std::uint64_t steps,
                                        bool stop_at_threshold = false);
SinkhornResult<double> sinkhorn_scale_float(const DMat& a, std::uint64_t steps,
                                            bool stop_at_threshold = false);

// Default iteration budget for integer input: derived from the classical
// permanent growth argument, deliberately generous.
std::uint64_t sinkhorn_iteration_bound(const NonnegMatrix& a);

// Decides Per(A) > 0 for a nonnegative rational matrix: zero lines mean no,
// otherwise scale the integerized matrix and test min ds < 1/n.
bool permanent_positive(const NonnegMatrix& a,
                        std::optional<std::uint64_t> budget = std::nullopt);

}  // namespace opscale
