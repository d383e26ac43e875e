#pragma once

#include <utility>
#include <vector>

#include "opscale/matrix.hpp"

namespace opscale {

// Doubly-stochastic defect of a completely positive map:
//   row_gap = tr[(T(I) - I)^2], col_gap = tr[(T*(I) - I)^2].
struct DSReport {
  Rational ds_value;
  Rational row_gap;
  Rational col_gap;
};

// Size metadata, computed on the integer form of the operator.
struct OperatorMeta {
  int m = 0;          // number of Kraus operators
  Integer gamma;      // integerization factor (lcm of all entry denominators)
  Integer max_entry;  // max |entry| after integerization
  std::size_t max_bits = 0;
};

// T(X) = sum_i A_i X A_i^T over the rationals. Kraus operators are all n x n.
class CPOperator {
 public:
  explicit CPOperator(std::vector<QMat> kraus);

  int n() const { return n_; }
  int m() const { return static_cast<int>(kraus_.size()); }
  const std::vector<QMat>& kraus() const { return kraus_; }

  QMat apply(const QMat& x) const;       // T(X)
  QMat dual_apply(const QMat& x) const;  // T*(X) = sum_i A_i^T X A_i

  DSReport ds() const;

  // Kraus set {A_i (x) B_j}; realizes T1 (x) T2 on dimension n1*n2.
  CPOperator tensor(const CPOperator& other) const;

  // Maximal linearly independent subset of the Kraus set, keeping the first
  // occurrence of each independent direction. Only safe for rank/fullness
  // decisions: the span is preserved, the map itself generally is not.
  CPOperator reduce_kraus_basis() const;

  // Multiplies every Kraus operator by gamma = lcm of all denominators.
  // Capacity transforms as cap(out) = gamma^(2n) * cap(in).
  std::pair<CPOperator, Integer> integerize() const;

  bool has_integer_entries() const;

  // Embedding used by the rank-decreasing reduction: on dimension n + c - 1,
  //   Tbar(X) = diag( T(X11) + tr(X22) I_n , tr(X11) I_{c-1} ),
  // with Kraus set {A_i ⊕ 0} ∪ {E_{k,n+l}} ∪ {E_{n+l,k}}. T is c-rank-
  // decreasing iff Tbar is rank-decreasing. Requires 1 <= c <= n.
  CPOperator pad_bar(int c) const;

  OperatorMeta meta() const;

 private:
  int n_;
  std::vector<QMat> kraus_;
};

CPOperator tensor(const CPOperator& a, const CPOperator& b);

}  // namespace opscale
