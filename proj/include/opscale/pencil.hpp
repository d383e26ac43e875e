#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opscale/formula.hpp"
#include "opscale/matrix.hpp"

namespace opscale {

// L = A0 + sum_i x_i * A_i with rational coefficient matrices. A0 is absent
// for homogeneous pencils. vars[i] names the variable of coeffs[i].
struct LinearMatrixPencil {
  int rows = 0;
  int cols = 0;
  std::vector<std::string> vars;
  std::optional<QMat> a0;
  std::vector<QMat> coeffs;

  bool is_square() const { return rows == cols; }
  bool is_homogeneous() const { return !a0.has_value(); }
  void validate() const;
};

// Evaluate at a scalar point: A0 + sum beta_i A_i.
QMat eval_pencil(const LinearMatrixPencil& p, const std::vector<Rational>& point);

// Evaluate at a matrix substitution of dimension d: each entry
// c0 + sum c_i x_i becomes the d x d block c0*I + sum c_i X_i. Every pencil
// variable must be present in `subst` with a d x d matrix.
QMat eval_pencil(const LinearMatrixPencil& p,
                 const std::map<std::string, QMat>& subst, int d);

// Homogenize: fold A0 into a fresh variable with coefficient A0. Homogeneous
// input is returned unchanged. The fresh variable is named "x0" unless taken.
LinearMatrixPencil affine_to_linear(const LinearMatrixPencil& p);

// Matrix with formula entries.
struct SymbolicMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<FormulaPtr> entries;  // row-major

  const FormulaPtr& at(int i, int j) const { return entries[i * cols + j]; }
  FormulaPtr& at(int i, int j) { return entries[i * cols + j]; }
  bool division_free() const;
};

SymbolicMatrix symbolic_from_pencil(const LinearMatrixPencil& p);

// Higman linearization. Input entries must be division free. Repeatedly peels
// the first product (row-major scan, leftmost sum term) into a border of one
// extra row and column until every entry is affine, then collects the affine
// matrix into a pencil. k is the number of peeling steps; the output dimension
// is input dimension + k. The nc-rank rises by exactly k under this transform.
struct HigmanResult {
  SymbolicMatrix affine;
  LinearMatrixPencil pencil;
  int peels = 0;
};

HigmanResult higman_linearize(const SymbolicMatrix& m);

// Build a pencil L_f of dimension at most 2 * size(f) such that for every
// matrix substitution where all inverses inside f are defined, L_f evaluates
// invertible and the top-right block of its inverse equals the value of f.
// f = 0 as an identity holds iff the bordered pencil below loses fullness.
LinearMatrixPencil formula_to_pencil(const FormulaPtr& f);

// For a square pencil L with the realization border produced above, the
// represented element is invertible iff [[v^T, L], [0, -u^T]] stays full,
// where u = e_1 and v = e_n. Requires a square pencil.
LinearMatrixPencil inverse_entry_border(const LinearMatrixPencil& p);

}  // namespace opscale
