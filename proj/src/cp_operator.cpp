#include "opscale/cp_operator.hpp"

#include <algorithm>

namespace opscale {

CPOperator::CPOperator(std::vector<QMat> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty())
    throw PreconditionError("operator needs at least one Kraus matrix");
  n_ = kraus_.front().rows();
  for (const auto& a : kraus_) {
    if (!a.is_square() || a.rows() != n_)
      throw DimensionError("Kraus operators must be square and equally sized");
  }
  if (n_ < 1) throw DimensionError("operator dimension must be >= 1");
}

QMat CPOperator::apply(const QMat& x) const {
  if (x.rows() != n_ || x.cols() != n_)
    throw DimensionError("apply: argument dimension mismatch");
  QMat out(n_, n_);
  for (const auto& a : kraus_) out = out + a * x * a.transpose();
  return out;
}

QMat CPOperator::dual_apply(const QMat& x) const {
  if (x.rows() != n_ || x.cols() != n_)
    throw DimensionError("dual_apply: argument dimension mismatch");
  QMat out(n_, n_);
  for (const auto& a : kraus_) out = out + a.transpose() * x * a;
  return out;
}

DSReport CPOperator::ds() const {
  QMat id = QMat::identity(n_);
  DSReport r;
  r.row_gap = trace_sq_deviation(apply(id));
  r.col_gap = trace_sq_deviation(dual_apply(id));
  r.ds_value = r.row_gap + r.col_gap;
  return r;
}

CPOperator CPOperator::tensor(const CPOperator& other) const {
  std::vector<QMat> out;
  out.reserve(static_cast<std::size_t>(m()) * other.m());
  for (const auto& a : kraus_)
    for (const auto& b : other.kraus_) out.push_back(kron(a, b));
  return CPOperator(std::move(out));
}

CPOperator tensor(const CPOperator& a, const CPOperator& b) { return a.tensor(b); }

CPOperator CPOperator::reduce_kraus_basis() const {
  // Row-reduce the m x n^2 matrix of vectorized Kraus operators, tracking
  // which original rows supply new pivots.
  const int dim = n_ * n_;
  std::vector<std::vector<Rational>> basis;  // echelon rows
  std::vector<int> pivot_col;
  std::vector<QMat> kept;
  for (const auto& a : kraus_) {
    std::vector<Rational> v(dim);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) v[i * n_ + j] = a(i, j);
    for (std::size_t r = 0; r < basis.size(); ++r) {
      const Rational& lead = v[pivot_col[r]];
      if (lead == 0) continue;
      Rational f = lead / basis[r][pivot_col[r]];
      for (int c = 0; c < dim; ++c) v[c] -= f * basis[r][c];
    }
    int pc = -1;
    for (int c = 0; c < dim; ++c)
      if (v[c] != 0) {
        pc = c;
        break;
      }
    if (pc >= 0) {
      basis.push_back(std::move(v));
      pivot_col.push_back(pc);
      kept.push_back(a);
    }
  }
  if (kept.empty()) kept.push_back(QMat::zero(n_, n_));
  return CPOperator(std::move(kept));
}

std::pair<CPOperator, Integer> CPOperator::integerize() const {
  Integer gamma(1);
  for (const auto& a : kraus_)
    for (const auto& v : a.data())
      mpz_lcm(gamma.get_mpz_t(), gamma.get_mpz_t(), v.get_den().get_mpz_t());
  if (gamma == 1) return {*this, gamma};
  std::vector<QMat> out = kraus_;
  Rational g(gamma);
  for (auto& a : out)
    for (auto& v : a.data()) v *= g;
  return {CPOperator(std::move(out)), gamma};
}

bool CPOperator::has_integer_entries() const {
  for (const auto& a : kraus_)
    for (const auto& v : a.data())
      if (v.get_den() != 1) return false;
  return true;
}

CPOperator CPOperator::pad_bar(int c) const {
  if (c < 1 || c > n_)
    throw PreconditionError("pad_bar: c must satisfy 1 <= c <= n");
  const int big = n_ + c - 1;
  std::vector<QMat> out;
  out.reserve(kraus_.size() + 2 * static_cast<std::size_t>(n_) * (c - 1));
  for (const auto& a : kraus_) {
    QMat pad(big, big);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) pad(i, j) = a(i, j);
    out.push_back(std::move(pad));
  }
  for (int k = 0; k < n_; ++k)
    for (int l = 0; l < c - 1; ++l) {
      QMat e(big, big);
      e(k, n_ + l) = 1;
      out.push_back(std::move(e));
      QMat f(big, big);
      f(n_ + l, k) = 1;
      out.push_back(std::move(f));
    }
  return CPOperator(std::move(out));
}

OperatorMeta CPOperator::meta() const {
  OperatorMeta meta;
  meta.m = m();
  auto [integer_op, gamma] = integerize();
  meta.gamma = gamma;
  meta.max_entry = 0;
  for (const auto& a : integer_op.kraus()) {
    Rational big = max_abs(a);
    Integer num = big.get_num();
    if (num < 0) num = -num;
    if (num > meta.max_entry) meta.max_entry = num;
  }
  for (const auto& a : kraus_)
    for (const auto& v : a.data()) meta.max_bits = std::max(meta.max_bits, bit_size(v));
  return meta;
}

}  // namespace opscale
