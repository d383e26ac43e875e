#include "opscale/pencil.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "opscale/errors.hpp"

namespace opscale {

void LinearMatrixPencil::validate() const {
  if (rows < 1 || cols < 1) throw DimensionError("pencil must be nonempty");
  if (vars.size() != coeffs.size()) {
    throw DimensionError("pencil has " + std::to_string(vars.size()) +
                         " variables but " + std::to_string(coeffs.size()) +
                         " coefficient matrices");
  }
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (v.empty()) throw PreconditionError("pencil variable name is empty");
    if (!seen.insert(v).second) {
      throw PreconditionError("duplicate pencil variable " + v);
    }
  }
  for (const auto& c : coeffs) {
    if (c.rows() != rows || c.cols() != cols) {
      throw DimensionError("coefficient matrix shape mismatch");
    }
  }
  if (a0 && (a0->rows() != rows || a0->cols() != cols)) {
    throw DimensionError("constant matrix shape mismatch");
  }
}

QMat eval_pencil(const LinearMatrixPencil& p, const std::vector<Rational>& point) {
  p.validate();
  if (point.size() != p.vars.size()) {
    throw DimensionError("evaluation point has the wrong number of entries");
  }
  QMat out = p.a0 ? *p.a0 : QMat::zero(p.rows, p.cols);
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
    if (point[i] == 0) continue;
    for (int r = 0; r < p.rows; ++r) {
      for (int c = 0; c < p.cols; ++c) {
        out(r, c) += point[i] * p.coeffs[i](r, c);
      }
    }
  }
  return out;
}

QMat eval_pencil(const LinearMatrixPencil& p,
                 const std::map<std::string, QMat>& subst, int d) {
  p.validate();
  if (d < 1) throw DimensionError("substitution dimension must be positive");
  QMat out = QMat::zero(p.rows * d, p.cols * d);
  if (p.a0) {
    for (int r = 0; r < p.rows; ++r) {
      for (int c = 0; c < p.cols; ++c) {
        if ((*p.a0)(r, c) == 0) continue;
        for (int k = 0; k < d; ++k) out(r * d + k, c * d + k) += (*p.a0)(r, c);
      }
    }
  }
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
    auto it = subst.find(p.vars[i]);
    if (it == subst.end()) {
      throw PreconditionError("no substitution for pencil variable " +
                              p.vars[i]);
    }
    const QMat& x = it->second;
    if (x.rows() != d || x.cols() != d) {
      throw DimensionError("substitution for " + p.vars[i] +
                           " has the wrong dimension");
    }
    for (int r = 0; r < p.rows; ++r) {
      for (int c = 0; c < p.cols; ++c) {
        const Rational& coeff = p.coeffs[i](r, c);
        if (coeff == 0) continue;
        for (int a = 0; a < d; ++a) {
          for (int b = 0; b < d; ++b) {
            out(r * d + a, c * d + b) += coeff * x(a, b);
          }
        }
      }
    }
  }
  return out;
}

LinearMatrixPencil affine_to_linear(const LinearMatrixPencil& p) {
  p.validate();
  if (!p.a0) return p;
  std::string fresh = "x0";
  while (std::find(p.vars.begin(), p.vars.end(), fresh) != p.vars.end()) {
    fresh += "_";
  }
  LinearMatrixPencil out;
  out.rows = p.rows;
  out.cols = p.cols;
  out.vars.reserve(p.vars.size() + 1);
  out.vars.push_back(fresh);
  out.vars.insert(out.vars.end(), p.vars.begin(), p.vars.end());
  out.coeffs.reserve(p.coeffs.size() + 1);
  out.coeffs.push_back(*p.a0);
  out.coeffs.insert(out.coeffs.end(), p.coeffs.begin(), p.coeffs.end());
  return out;
}

bool SymbolicMatrix::division_free() const {
  for (const auto& e : entries) {
    if (!e || e->contains_inv()) return false;
  }
  return true;
}

SymbolicMatrix symbolic_from_pencil(const LinearMatrixPencil& p) {
  p.validate();
  SymbolicMatrix m;
  m.rows = p.rows;
  m.cols = p.cols;
  m.entries.resize(static_cast<std::size_t>(p.rows) * p.cols);
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) {
      FormulaPtr e;
      auto append = [&](FormulaPtr t) {
        e = e ? Formula::add(e, std::move(t)) : std::move(t);
      };
      if (p.a0 && (*p.a0)(r, c) != 0) append(Formula::constant((*p.a0)(r, c)));
      for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
        const Rational& coeff = p.coeffs[i](r, c);
        if (coeff == 0) continue;
        FormulaPtr v = Formula::var(p.vars[i]);
        append(coeff == 1 ? v : Formula::mul(Formula::constant(coeff), v));
      }
      m.at(r, c) = e ? e : Formula::constant(Rational(0));
    }
  }
  return m;
}

namespace {

// Ordering for collected pencil variables: x<number> names numerically first,
// everything else lexicographically after them.
bool var_name_less(const std::string& a, const std::string& b) {
  auto classify = [](const std::string& s) -> std::pair<int, long> {
    if (s.size() >= 2 && s[0] == 'x') {
      long v = 0;
      for (std::size_t i = 1; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return {1, 0};
        v = v * 10 + (s[i] - '0');
      }
      return {0, v};
    }
    return {1, 0};
  };
  auto ca = classify(a);
  auto cb = classify(b);
  if (ca.first != cb.first) return ca.first < cb.first;
  if (ca.first == 0 && ca.second != cb.second) return ca.second < cb.second;
  return a < b;
}

LinearMatrixPencil collect_affine_pencil(
    int rows, int cols, const std::vector<std::vector<AffineForm>>& grid) {
  std::set<std::string, bool (*)(const std::string&, const std::string&)>
      names(var_name_less);
  bool any_const = false;
  for (const auto& row : grid) {
    for (const auto& form : row) {
      if (form.constant != 0) any_const = true;
      for (const auto& [n, c] : form.coeffs) {
        (void)c;
        names.insert(n);
      }
    }
  }
  LinearMatrixPencil p;
  p.rows = rows;
  p.cols = cols;
  p.vars.assign(names.begin(), names.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < p.vars.size(); ++i) index[p.vars[i]] = i;
  p.coeffs.assign(p.vars.size(), QMat::zero(rows, cols));
  if (any_const) p.a0 = QMat::zero(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const AffineForm& form = grid[r][c];
      if (form.constant != 0) (*p.a0)(r, c) = form.constant;
      for (const auto& [n, coeff] : form.coeffs) {
        p.coeffs[index[n]](r, c) = coeff;
      }
    }
  }
  return p;
}

void flatten_sum(const FormulaPtr& f, std::vector<FormulaPtr>& terms) {
  if (f->kind() == Formula::Kind::Add) {
    flatten_sum(f->lhs(), terms);
    flatten_sum(f->rhs(), terms);
  } else {
    terms.push_back(f);
  }
}

}  // namespace

HigmanResult higman_linearize(const SymbolicMatrix& m) {
  if (m.rows < 1 || m.cols < 1) {
    throw DimensionError("symbolic matrix must be nonempty");
  }
  if (m.entries.size() != static_cast<std::size_t>(m.rows) * m.cols) {
    throw DimensionError("symbolic matrix entry count mismatch");
  }
  if (!m.division_free()) {
    throw PreconditionError("linearization requires division-free entries");
  }

  std::vector<std::vector<FormulaPtr>> work(m.rows);
  for (int r = 0; r < m.rows; ++r) {
    work[r].resize(m.cols);
    for (int c = 0; c < m.cols; ++c) work[r][c] = m.at(r, c);
  }

  int peels = 0;
  for (;;) {
    int pr = -1, pc = -1;
    for (int r = 0; r < static_cast<int>(work.size()) && pr < 0; ++r) {
      for (int c = 0; c < static_cast<int>(work[r].size()); ++c) {
        if (!affine_form(work[r][c])) {
          pr = r;
          pc = c;
          break;
        }
      }
    }
    if (pr < 0) break;

    // Split the offending entry as a + b*c where b*c is the leftmost
    // non-affine product of its sum spine.
    std::vector<FormulaPtr> terms;
    flatten_sum(work[pr][pc], terms);
    std::size_t hit = terms.size();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (!affine_form(terms[i])) {
        hit = i;
        break;
      }
    }
    if (hit == terms.size() ||
        terms[hit]->kind() != Formula::Kind::Mul) {
      throw PreconditionError("non-affine entry without a product to peel");
    }
    FormulaPtr b = terms[hit]->lhs();
    FormulaPtr c = terms[hit]->rhs();
    FormulaPtr a;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i == hit) continue;
      a = a ? Formula::add(a, terms[i]) : terms[i];
    }
    if (!a) a = Formula::constant(Rational(0));

    int old_rows = static_cast<int>(work.size());
    int old_cols = static_cast<int>(work[0].size());
    FormulaPtr zero = Formula::constant(Rational(0));
    for (auto& row : work) row.push_back(zero);
    work.push_back(std::vector<FormulaPtr>(old_cols + 1, zero));
    work[pr][pc] = a;
    work[pr][old_cols] = b;
    work[old_rows][pc] = negate_formula(c);
    work[old_rows][old_cols] = Formula::constant(Rational(1));
    ++peels;
  }

  HigmanResult res;
  res.peels = peels;
  res.affine.rows = static_cast<int>(work.size());
  res.affine.cols = static_cast<int>(work[0].size());
  res.affine.entries.reserve(static_cast<std::size_t>(res.affine.rows) *
                             res.affine.cols);
  std::vector<std::vector<AffineForm>> grid(work.size());
  for (std::size_t r = 0; r < work.size(); ++r) {
    grid[r].reserve(work[r].size());
    for (const auto& e : work[r]) {
      res.affine.entries.push_back(e);
      grid[r].push_back(*affine_form(e));
    }
  }
  res.pencil = collect_affine_pencil(res.affine.rows, res.affine.cols, grid);
  return res;
}

namespace {

// Realization f = u * M^{-1} * v with u an affine row vector, M affine and
// invertible wherever all inverses inside f are defined, v a constant column.
struct Realization {
  std::vector<AffineForm> u;
  std::vector<std::vector<AffineForm>> m;
  std::vector<Rational> v;

  std::size_t dim() const { return v.size(); }
};

AffineForm af_const(Rational q) {
  AffineForm a;
  a.constant = std::move(q);
  return a;
}

AffineForm af_scale(const Rational& s, const AffineForm& a) {
  AffineForm out;
  out.constant = s * a.constant;
  if (s != 0) {
    for (const auto& [n, c] : a.coeffs) out.coeffs[n] = s * c;
  }
  return out;
}

Realization realize(const FormulaPtr& f) {
  if (auto a = affine_form(f)) {
    Realization r;
    r.u = {*a};
    r.m = {{af_const(Rational(1))}};
    r.v = {Rational(1)};
    return r;
  }
  switch (f->kind()) {
    case Formula::Kind::Add: {
      Realization l = realize(f->lhs());
      Realization r = realize(f->rhs());
      Realization out;
      std::size_t k = l.dim() + r.dim();
      out.u = l.u;
      out.u.insert(out.u.end(), r.u.begin(), r.u.end());
      out.v = l.v;
      out.v.insert(out.v.end(), r.v.begin(), r.v.end());
      out.m.assign(k, std::vector<AffineForm>(k, af_const(Rational(0))));
      for (std::size_t i = 0; i < l.dim(); ++i) {
        for (std::size_t j = 0; j < l.dim(); ++j) out.m[i][j] = l.m[i][j];
      }
      for (std::size_t i = 0; i < r.dim(); ++i) {
        for (std::size_t j = 0; j < r.dim(); ++j) {
          out.m[l.dim() + i][l.dim() + j] = r.m[i][j];
        }
      }
      return out;
    }
    case Formula::Kind::Mul: {
      Realization l = realize(f->lhs());
      Realization r = realize(f->rhs());
      Realization out;
      std::size_t k = l.dim() + r.dim();
      out.u.assign(k, af_const(Rational(0)));
      for (std::size_t i = 0; i < l.dim(); ++i) out.u[i] = l.u[i];
      out.v.assign(k, Rational(0));
      for (std::size_t i = 0; i < r.dim(); ++i) out.v[l.dim() + i] = r.v[i];
      out.m.assign(k, std::vector<AffineForm>(k, af_const(Rational(0))));
      for (std::size_t i = 0; i < l.dim(); ++i) {
        for (std::size_t j = 0; j < l.dim(); ++j) out.m[i][j] = l.m[i][j];
        // Coupling block -v_l * u_r keeps the product in the top-right
        // corner of the inverse.
        for (std::size_t j = 0; j < r.dim(); ++j) {
          out.m[i][l.dim() + j] = af_scale(-l.v[i], r.u[j]);
        }
      }
      for (std::size_t i = 0; i < r.dim(); ++i) {
        for (std::size_t j = 0; j < r.dim(); ++j) {
          out.m[l.dim() + i][l.dim() + j] = r.m[i][j];
        }
      }
      return out;
    }
    case Formula::Kind::Inv: {
      Realization g = realize(f->child());
      Realization out;
      std::size_t k = g.dim() + 1;
      out.m.assign(k, std::vector<AffineForm>(k, af_const(Rational(0))));
      for (std::size_t i = 0; i < g.dim(); ++i) {
        for (std::size_t j = 0; j < g.dim(); ++j) out.m[i][j] = g.m[i][j];
        out.m[i][k - 1] = af_const(g.v[i]);
        out.m[k - 1][i] = g.u[i];
      }
      out.u.assign(k, af_const(Rational(0)));
      out.u[k - 1] = af_const(Rational(-1));
      out.v.assign(k, Rational(0));
      out.v[k - 1] = Rational(1);
      return out;
    }
    case Formula::Kind::Var:
    case Formula::Kind::Const:
      break;  // handled by the affine branch
  }
  throw PreconditionError("unreachable formula kind in realization");
}

}  // namespace

LinearMatrixPencil formula_to_pencil(const FormulaPtr& f) {
  if (!f) throw PreconditionError("cannot realize a null formula");
  if (auto a = affine_form(f)) {
    // [[1, -f], [0, 1]]: inverse is [[1, f], [0, 1]].
    std::vector<std::vector<AffineForm>> grid(2);
    grid[0] = {af_const(Rational(1)), af_scale(Rational(-1), *a)};
    grid[1] = {af_const(Rational(0)), af_const(Rational(1))};
    return collect_affine_pencil(2, 2, grid);
  }
  Realization r = realize(f);
  std::size_t k = r.dim();
  std::size_t n = k + 2;
  std::vector<std::vector<AffineForm>> grid(
      n, std::vector<AffineForm>(n, af_const(Rational(0))));
  grid[0][0] = af_const(Rational(1));
  for (std::size_t j = 0; j < k; ++j) grid[0][1 + j] = r.u[j];
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) grid[1 + i][1 + j] = r.m[i][j];
    grid[1 + i][n - 1] = af_const(r.v[i]);
  }
  grid[n - 1][n - 1] = af_const(Rational(1));
  return collect_affine_pencil(static_cast<int>(n), static_cast<int>(n), grid);
}

LinearMatrixPencil inverse_entry_border(const LinearMatrixPencil& p) {
  p.validate();
  if (!p.is_square()) {
    throw DimensionError("inverse-entry border requires a square pencil");
  }
  int n = p.rows;
  LinearMatrixPencil out;
  out.rows = n + 1;
  out.cols = n + 1;
  out.vars = p.vars;
  out.a0 = QMat::zero(n + 1, n + 1);
  (*out.a0)(n - 1, 0) = 1;   // v = e_n in the first column
  (*out.a0)(n, 1) = -1;      // -u^T = -e_1^T in the last row
  if (p.a0) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) (*out.a0)(i, j + 1) += (*p.a0)(i, j);
    }
  }
  out.coeffs.reserve(p.coeffs.size());
  for (const auto& c : p.coeffs) {
    QMat shifted = QMat::zero(n + 1, n + 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) shifted(i, j + 1) = c(i, j);
    }
    out.coeffs.push_back(std::move(shifted));
  }
  return out;
}

}  // namespace opscale
