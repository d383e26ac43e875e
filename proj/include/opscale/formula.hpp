#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opscale/matrix.hpp"

namespace opscale {

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Non-commutative arithmetic formula. Binary tree; Add and Mul keep their
// operands ordered (multiplication does not commute here).
class Formula {
 public:
  enum class Kind { Var, Const, Add, Mul, Inv };

  static FormulaPtr var(std::string name);
  static FormulaPtr constant(Rational value);
  static FormulaPtr add(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr mul(FormulaPtr lhs, FormulaPtr rhs);
  static FormulaPtr inv(FormulaPtr child);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Rational& value() const { return value_; }
  const FormulaPtr& lhs() const { return lhs_; }
  const FormulaPtr& rhs() const { return rhs_; }
  const FormulaPtr& child() const { return lhs_; }

  // Gate count in the flattened view: chained binary Add (resp. Mul) nodes
  // count as one n-ary gate, leaves count one each. "x1 + x1*inv(x2)*x1" has
  // size 7.
  std::size_t size() const;

  bool contains_inv() const;

 private:
  Formula() = default;
  std::size_t flattened_operand_sizes(Kind k) const;

  Kind kind_ = Kind::Const;
  std::string name_;
  Rational value_;
  FormulaPtr lhs_, rhs_;
  mutable std::size_t cached_size_ = 0;
};

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);

// Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := ['-'] atom
//   atom   := rational | var | '(' expr ')' | 'inv' '(' expr ')'
//   var    := 'x' digits
// Subtraction and unary minus desugar to Add / Mul by -1 (negative literals
// fold into Const). Throws ParseError with a position on malformed input.
FormulaPtr parse_formula(std::string_view text);

// Re-parseable rendering; parse_formula(print_formula(f)) is structurally
// equal to f.
std::string print_formula(const FormulaPtr& f);

// Evaluate over d x d rational matrices; constants become c * I. Returns
// nullopt when some Inv hits a singular matrix (the substitution lies outside
// the domain). Every variable of the formula must appear in `subst`.
std::optional<QMat> eval_formula(const FormulaPtr& f,
                                 const std::map<std::string, QMat>& subst,
                                 int dim);

std::vector<std::string> collect_variables(const FormulaPtr& f);

// c0 + sum_v c_v * v when the formula is affine in its variables (constants
// may multiply from either side); nullopt otherwise.
struct AffineForm {
  Rational constant;
  std::map<std::string, Rational> coeffs;

  bool is_constant() const { return coeffs.empty(); }
  bool is_zero() const { return constant == 0 && coeffs.empty(); }
};

std::optional<AffineForm> affine_form(const FormulaPtr& f);

// Negation that never manufactures a new non-affine product: constants flip
// sign, sums distribute, products negate their left factor.
FormulaPtr negate_formula(const FormulaPtr& f);

}  // namespace opscale
