#include "opscale/formula.hpp"

#include <cctype>
#include <set>

#include "opscale/errors.hpp"

namespace opscale {

FormulaPtr Formula::var(std::string name) {
  auto f = std::shared_ptr<Formula>(new Formula);
  f->kind_ = Kind::Var;
  f->name_ = std::move(name);
  return f;
}

FormulaPtr Formula::constant(Rational value) {
  auto f = std::shared_ptr<Formula>(new Formula);
  f->kind_ = Kind::Const;
  f->value_ = std::move(value);
  // mpq_class's two-integer constructor skips reduction; printing and
  // structural equality both assume lowest terms, so enforce it here.
  f->value_.canonicalize();
  return f;
}

FormulaPtr Formula::add(FormulaPtr lhs, FormulaPtr rhs) {
  auto f = std::shared_ptr<Formula>(new Formula);
  f->kind_ = Kind::Add;
  f->lhs_ = std::move(lhs);
  f->rhs_ = std::move(rhs);
  return f;
}

FormulaPtr Formula::mul(FormulaPtr lhs, FormulaPtr rhs) {
  auto f = std::shared_ptr<Formula>(new Formula);
  f->kind_ = Kind::Mul;
  f->lhs_ = std::move(lhs);
  f->rhs_ = std::move(rhs);
  return f;
}

FormulaPtr Formula::inv(FormulaPtr child) {
  auto f = std::shared_ptr<Formula>(new Formula);
  f->kind_ = Kind::Inv;
  f->lhs_ = std::move(child);
  return f;
}

std::size_t Formula::flattened_operand_sizes(Kind k) const {
  // Sum of sizes of the maximal operand list of an n-ary chain of kind k.
  if (kind_ == k) {
    return lhs_->flattened_operand_sizes(k) + rhs_->flattened_operand_sizes(k);
  }
  return size();
}

std::size_t Formula::size() const {
  if (cached_size_ != 0) return cached_size_;
  std::size_t s = 0;
  switch (kind_) {
    case Kind::Var:
    case Kind::Const:
      s = 1;
      break;
    case Kind::Inv:
      s = 1 + lhs_->size();
      break;
    case Kind::Add:
    case Kind::Mul:
      s = 1 + lhs_->flattened_operand_sizes(kind_) +
          rhs_->flattened_operand_sizes(kind_);
      break;
  }
  cached_size_ = s;
  return s;
}

bool Formula::contains_inv() const {
  switch (kind_) {
    case Kind::Var:
    case Kind::Const:
      return false;
    case Kind::Inv:
      return true;
    case Kind::Add:
    case Kind::Mul:
      return lhs_->contains_inv() || rhs_->contains_inv();
  }
  return false;
}

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case Formula::Kind::Var:
      return a->name() == b->name();
    case Formula::Kind::Const:
      return a->value() == b->value();
    case Formula::Kind::Inv:
      return structurally_equal(a->child(), b->child());
    case Formula::Kind::Add:
    case Formula::Kind::Mul:
      return structurally_equal(a->lhs(), b->lhs()) &&
             structurally_equal(a->rhs(), b->rhs());
  }
  return false;
}

namespace {

FormulaPtr neg(const FormulaPtr& f) { return negate_formula(f); }

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  FormulaPtr run() {
    FormulaPtr f = expr();
    skip_ws();
    if (pos_ != s_.size()) {
      throw ParseError("unexpected trailing input", pos_);
    }
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() &&
           std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!consume(c)) {
      throw ParseError(std::string("expected '") + c + "' " + what, pos_);
    }
  }

  FormulaPtr expr() {
    FormulaPtr f = term();
    for (;;) {
      if (consume('+')) {
        f = Formula::add(f, term());
      } else if (consume('-')) {
        f = Formula::add(f, neg(term()));
      } else {
        return f;
      }
    }
  }

  FormulaPtr term() {
    FormulaPtr f = factor();
    while (consume('*')) {
      f = Formula::mul(f, factor());
    }
    return f;
  }

  FormulaPtr factor() {
    if (consume('-')) {
      return neg(atom());
    }
    return atom();
  }

  std::string digits() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError("expected digits", pos_);
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  FormulaPtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) {
      throw ParseError("unexpected end of input", pos_);
    }
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      FormulaPtr f = expr();
      expect(')', "to close parenthesis");
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num = digits();
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        std::string den = digits();
        return Formula::constant(parse_rational(num + "/" + den));
      }
      return Formula::constant(parse_rational(num));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
              s_[pos_] == '_')) {
        ++pos_;
      }
      std::string word(s_.substr(start, pos_ - start));
      if (word == "inv") {
        expect('(', "after inv");
        FormulaPtr f = expr();
        expect(')', "to close inv");
        return Formula::inv(f);
      }
      if (word.size() >= 2 && word[0] == 'x') {
        bool numeric = true;
        for (std::size_t i = 1; i < word.size(); ++i) {
          if (!std::isdigit(static_cast<unsigned char>(word[i]))) {
            numeric = false;
            break;
          }
        }
        if (numeric) return Formula::var(word);
      }
      throw ParseError("unknown identifier '" + word + "'", start);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// Printer precedence levels: sum position 1, product position 2, factor
// position 3. A factor may start with '-', so a negated atom needs no parens
// even on the right of '*'.
bool is_neg_form(const FormulaPtr& f, FormulaPtr* stripped) {
  if (f->kind() == Formula::Kind::Const && f->value() < 0) {
    *stripped = Formula::constant(-f->value());
    return true;
  }
  if (f->kind() == Formula::Kind::Mul &&
      f->lhs()->kind() == Formula::Kind::Const && f->lhs()->value() == -1) {
    *stripped = f->rhs();
    return true;
  }
  return false;
}

void print_rec(const FormulaPtr& f, int ctx, std::string& out) {
  switch (f->kind()) {
    case Formula::Kind::Var:
      out += f->name();
      return;
    case Formula::Kind::Const: {
      if (f->value() < 0) {
        if (ctx >= 2) {
          out += '(';
          out += to_string(f->value());
          out += ')';
        } else {
          out += to_string(f->value());
        }
      } else {
        out += to_string(f->value());
      }
      return;
    }
    case Formula::Kind::Inv:
      out += "inv(";
      print_rec(f->child(), 1, out);
      out += ')';
      return;
    case Formula::Kind::Add: {
      bool parens = ctx >= 2;
      if (parens) out += '(';
      print_rec(f->lhs(), 1, out);
      FormulaPtr stripped;
      // " - X" reparses as negate(X), which only reproduces the original tree
      // when X is a literal, a variable, or an inv() call. Wider operands keep
      // the explicit "+ (-1)*..." spelling so the round trip stays structural.
      if (is_neg_form(f->rhs(), &stripped) &&
          (f->rhs()->kind() == Formula::Kind::Const ||
           stripped->kind() == Formula::Kind::Var ||
           stripped->kind() == Formula::Kind::Inv)) {
        out += " - ";
        print_rec(stripped, 2, out);
      } else {
        out += " + ";
        print_rec(f->rhs(), 2, out);
      }
      if (parens) out += ')';
      return;
    }
    case Formula::Kind::Mul: {
      bool parens = ctx >= 3;
      FormulaPtr stripped;
      if (is_neg_form(f, &stripped) &&
          (stripped->kind() == Formula::Kind::Var ||
           stripped->kind() == Formula::Kind::Inv)) {
        // Render -1 * x as the factor "-x"; legal in any factor position.
        out += '-';
        print_rec(stripped, 3, out);
        return;
      }
      if (parens) out += '(';
      print_rec(f->lhs(), 2, out);
      out += '*';
      print_rec(f->rhs(), 3, out);
      if (parens) out += ')';
      return;
    }
  }
}

}  // namespace

FormulaPtr parse_formula(std::string_view text) { return Parser(text).run(); }

std::string print_formula(const FormulaPtr& f) {
  if (!f) throw PreconditionError("cannot print a null formula");
  std::string out;
  print_rec(f, 1, out);
  return out;
}

FormulaPtr negate_formula(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Const:
      return Formula::constant(-f->value());
    case Formula::Kind::Add:
      return Formula::add(negate_formula(f->lhs()), negate_formula(f->rhs()));
    case Formula::Kind::Mul: {
      FormulaPtr left = negate_formula(f->lhs());
      // Collapse a double negation instead of leaving a unit factor behind.
      if (left->kind() == Formula::Kind::Const && left->value() == 1)
        return f->rhs();
      return Formula::mul(left, f->rhs());
    }
    case Formula::Kind::Var:
    case Formula::Kind::Inv:
      return Formula::mul(Formula::constant(Rational(-1)), f);
  }
  return f;
}

std::optional<QMat> eval_formula(const FormulaPtr& f,
                                 const std::map<std::string, QMat>& subst,
                                 int dim) {
  if (dim < 1) throw DimensionError("evaluation dimension must be positive");
  switch (f->kind()) {
    case Formula::Kind::Var: {
      auto it = subst.find(f->name());
      if (it == subst.end()) {
        throw PreconditionError("no substitution for variable " + f->name());
      }
      if (it->second.rows() != dim || it->second.cols() != dim) {
        throw DimensionError("substitution for " + f->name() +
                             " has the wrong dimension");
      }
      return it->second;
    }
    case Formula::Kind::Const: {
      QMat m = QMat::identity(dim);
      for (int i = 0; i < dim; ++i) m(i, i) = f->value();
      return m;
    }
    case Formula::Kind::Add: {
      auto l = eval_formula(f->lhs(), subst, dim);
      if (!l) return std::nullopt;
      auto r = eval_formula(f->rhs(), subst, dim);
      if (!r) return std::nullopt;
      return *l + *r;
    }
    case Formula::Kind::Mul: {
      auto l = eval_formula(f->lhs(), subst, dim);
      if (!l) return std::nullopt;
      auto r = eval_formula(f->rhs(), subst, dim);
      if (!r) return std::nullopt;
      return *l * *r;
    }
    case Formula::Kind::Inv: {
      auto c = eval_formula(f->child(), subst, dim);
      if (!c) return std::nullopt;
      try {
        return invert(*c);
      } catch (const SingularMatrixError&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

namespace {
void collect_rec(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind()) {
    case Formula::Kind::Var:
      out.insert(f->name());
      return;
    case Formula::Kind::Const:
      return;
    case Formula::Kind::Inv:
      collect_rec(f->child(), out);
      return;
    case Formula::Kind::Add:
    case Formula::Kind::Mul:
      collect_rec(f->lhs(), out);
      collect_rec(f->rhs(), out);
      return;
  }
}
}  // namespace

std::vector<std::string> collect_variables(const FormulaPtr& f) {
  std::set<std::string> s;
  collect_rec(f, s);
  return std::vector<std::string>(s.begin(), s.end());
}

std::optional<AffineForm> affine_form(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::Var: {
      AffineForm a;
      a.constant = 0;
      a.coeffs[f->name()] = 1;
      return a;
    }
    case Formula::Kind::Const: {
      AffineForm a;
      a.constant = f->value();
      return a;
    }
    case Formula::Kind::Inv:
      return std::nullopt;
    case Formula::Kind::Add: {
      auto l = affine_form(f->lhs());
      if (!l) return std::nullopt;
      auto r = affine_form(f->rhs());
      if (!r) return std::nullopt;
      l->constant += r->constant;
      for (const auto& [name, c] : r->coeffs) {
        auto [it, inserted] = l->coeffs.emplace(name, c);
        if (!inserted) it->second += c;
      }
      for (auto it = l->coeffs.begin(); it != l->coeffs.end();) {
        if (it->second == 0) {
          it = l->coeffs.erase(it);
        } else {
          ++it;
        }
      }
      return l;
    }
    case Formula::Kind::Mul: {
      auto l = affine_form(f->lhs());
      if (!l) return std::nullopt;
      auto r = affine_form(f->rhs());
      if (!r) return std::nullopt;
      // Affine only when at least one side is a plain constant.
      const AffineForm* scalar = nullptr;
      AffineForm* other = nullptr;
      if (l->is_constant()) {
        scalar = &*l;
        other = &*r;
      } else if (r->is_constant()) {
        scalar = &*r;
        other = &*l;
      } else {
        return std::nullopt;
      }
      AffineForm out;
      out.constant = scalar->constant * other->constant;
      if (scalar->constant != 0) {
        for (const auto& [name, c] : other->coeffs) {
          out.coeffs[name] = scalar->constant * c;
        }
      }
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace opscale
