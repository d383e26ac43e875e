#include <doctest.h>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "opscale/errors.hpp"
#include "opscale/formula.hpp"
#include "opscale/matrix.hpp"

using namespace opscale;

namespace {

FormulaPtr P(const std::string& s) { return parse_formula(s); }

// Arbitrary tree builder, deliberately allowed to produce shapes the parser
// itself would normalize away (Mul with a -1 literal on the left of a sum,
// unreduced unit factors) so the printer has to earn its round trip.
FormulaPtr random_tree(std::mt19937_64& gen, int depth) {
  std::uniform_int_distribution<int> leaf(0, 4);
  std::uniform_int_distribution<int> node(0, 9);
  if (depth == 0 || node(gen) < 3) {
    switch (leaf(gen)) {
      case 0: return Formula::var("x1");
      case 1: return Formula::var("x2");
      case 2: return Formula::var("x3");
      case 3: {
        std::uniform_int_distribution<int> num(-6, 6);
        std::uniform_int_distribution<int> den(1, 4);
        return Formula::constant(Rational(num(gen), den(gen)));
      }
      default: return Formula::constant(Rational(-1));
    }
  }
  switch (node(gen) % 3) {
    case 0:
      return Formula::add(random_tree(gen, depth - 1),
                          random_tree(gen, depth - 1));
    case 1:
      return Formula::mul(random_tree(gen, depth - 1),
                          random_tree(gen, depth - 1));
    default:
      return Formula::inv(random_tree(gen, depth - 1));
  }
}

}  // namespace

TEST_SUITE("formula") {

TEST_CASE("size counts gates of the flattened n-ary view") {
  CHECK(P("x1 + x2")->size() == 3);
  CHECK(P("inv(x1)")->size() == 2);
  CHECK(P("x1 + x1*inv(x2)*x1")->size() == 7);

  // Chains of the same operator are one gate however they associate.
  CHECK(P("x1 + x2 + x3")->size() == 4);
  CHECK(P("x1 + (x2 + x3)")->size() == 4);
  CHECK(P("x1*x2*x3")->size() == 4);
  CHECK(P("x1*(x2*x3)")->size() == 4);

  // Mixed operators break the chain.
  CHECK(P("x1*(x2 + x3)")->size() == 5);
  CHECK(P("x1")->size() == 1);
  CHECK(P("7/2")->size() == 1);

  // Subtraction desugars to + and a (-1)* factor, and is sized as such.
  CHECK(P("x1 - x2")->size() == 5);
}

TEST_CASE("contains_inv") {
  CHECK(P("inv(x1)")->contains_inv());
  CHECK(P("x1 + x1*inv(x2)*x1")->contains_inv());
  CHECK_FALSE(P("x1*x2 - x2*x1")->contains_inv());
  CHECK_FALSE(P("3/4")->contains_inv());
}

TEST_CASE("parser structure: precedence and associativity") {
  FormulaPtr f = P("x1 + x2*x3");
  REQUIRE(f->kind() == Formula::Kind::Add);
  CHECK(f->lhs()->kind() == Formula::Kind::Var);
  CHECK(f->rhs()->kind() == Formula::Kind::Mul);

  // Left associative chains.
  f = P("x1*x2*x3");
  REQUIRE(f->kind() == Formula::Kind::Mul);
  CHECK(f->lhs()->kind() == Formula::Kind::Mul);
  CHECK(f->rhs()->name() == "x3");

  // inv binds through its parentheses, tighter than *.
  f = P("x1*inv(x2)*x1");
  REQUIRE(f->kind() == Formula::Kind::Mul);
  CHECK(f->lhs()->rhs()->kind() == Formula::Kind::Inv);
  CHECK(f->lhs()->rhs()->child()->name() == "x2");

  CHECK(structurally_equal(P("(x1 + x2)*x3"),
                           Formula::mul(Formula::add(Formula::var("x1"),
                                                     Formula::var("x2")),
                                        Formula::var("x3"))));
}

TEST_CASE("parser structure: subtraction and unary minus desugar") {
  // x1 - x2 becomes x1 + (-1)*x2.
  FormulaPtr f = P("x1 - x2");
  REQUIRE(f->kind() == Formula::Kind::Add);
  REQUIRE(f->rhs()->kind() == Formula::Kind::Mul);
  CHECK(f->rhs()->lhs()->kind() == Formula::Kind::Const);
  CHECK(f->rhs()->lhs()->value() == -1);
  CHECK(f->rhs()->rhs()->name() == "x2");

  // A minus in front of a literal folds into the literal.
  f = P("-5");
  REQUIRE(f->kind() == Formula::Kind::Const);
  CHECK(f->value() == -5);
  CHECK(P("- 5/3")->value() == Rational(-5, 3));

  // Negating a sum distributes; negating a product flips its left factor.
  CHECK(structurally_equal(P("-(x1 + x2)"), P("-x1 - x2")));
  CHECK(structurally_equal(P("-(x1*x2)"), P("-x1*x2")));
  CHECK(structurally_equal(P("-x1"), Formula::mul(Formula::constant(-1),
                                                  Formula::var("x1"))));
}

TEST_CASE("parser accepts the variable grammar and canonicalizes literals") {
  CHECK(P("x23")->name() == "x23");
  CHECK(P("x007")->name() == "x007");
  CHECK(P("4/6")->value() == Rational(2, 3));
  CHECK(structurally_equal(P("  x1   +\tx2 "), P("x1 + x2")));
}

TEST_CASE("parse errors carry positions") {
  auto pos_of = [](const std::string& text) -> std::size_t {
    try {
      parse_formula(text);
    } catch (const ParseError& e) {
      return e.position;
    }
    return static_cast<std::size_t>(-1);
  };

  CHECK(pos_of("x1 + ") == 5);        // ran out of input
  CHECK(pos_of("x1 )") == 3);         // trailing junk
  CHECK(pos_of("(x1") == 3);          // unclosed paren
  CHECK(pos_of("x1 @ x2") == 3);      // nothing valid after x1
  CHECK(pos_of("@") == 0);
  CHECK(pos_of("foo") == 0);          // unknown identifier
  CHECK(pos_of("x") == 0);            // bare x is not a variable
  CHECK(pos_of("x1a") == 0);          // non-digit suffix
  CHECK(pos_of("x1 + y2") == 5);
  CHECK(pos_of("inv x1") == 4);       // inv requires its parenthesis
  CHECK(pos_of("1/") == 2);           // missing denominator digits

  try {
    parse_formula("x1 + zork");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("zork") != std::string::npos);
    CHECK(std::string(e.what()).find("position 5") != std::string::npos);
  }
}

TEST_CASE("printing pins") {
  CHECK(print_formula(P("x1 - x2")) == "x1 - x2");
  CHECK(print_formula(P("-x1")) == "-x1");
  CHECK(print_formula(P("x1 + x1*inv(x2)*x1")) == "x1 + x1*inv(x2)*x1");
  CHECK(print_formula(P("x1*(x2 + x3)")) == "x1*(x2 + x3)");
  CHECK(print_formula(P("x1 + (x2 + x3)")) == "x1 + (x2 + x3)");
  CHECK(print_formula(P("x1*(x2*x3)")) == "x1*(x2*x3)");
  CHECK(print_formula(P("-5")) == "-5");
  // A negative literal inside a product keeps its parentheses.
  CHECK(print_formula(Formula::mul(Formula::var("x1"),
                                   Formula::constant(-2))) == "x1*(-2)");
  CHECK_THROWS_AS(print_formula(nullptr), PreconditionError);
}

TEST_CASE("parse then print round trips structurally") {
  const std::vector<std::string> corpus = {
      "x1",
      "x1 + x2",
      "inv(x1)",
      "x1 + x1*inv(x2)*x1",
      "x1 - x2",
      "x1*x2 - x2*x1",
      "inv(x1) + inv(inv(x2) - x1)",
      "-(x1 + x2)*inv(x3 - 2)",
      "x1 + (-1)*(x2*x3)",
      "x1 + (-1)*(x2 + x3)",
      "x1 - 5",
      "(-1)*5 + x1",
      "x1*-inv(x2)",
      "0*x1 + 0",
      "5/3*x1 - 22/7",
  };
  for (const auto& s : corpus) {
    FormulaPtr f = P(s);
    CHECK_MESSAGE(structurally_equal(parse_formula(print_formula(f)), f),
                  "corpus round trip failed for: ", s,
                  " printed as: ", print_formula(f));
  }

  std::mt19937_64 gen(0x5eed'f0c4);
  for (int t = 0; t < 200; ++t) {
    FormulaPtr f = random_tree(gen, 4);
    std::string printed = print_formula(f);
    FormulaPtr back = parse_formula(printed);
    CHECK_MESSAGE(structurally_equal(back, f),
                  "random round trip failed, printed: ", printed);
    // Printing is stable: re-printing the reparse changes nothing.
    CHECK(print_formula(back) == printed);
  }
}

TEST_CASE("structural equality distinguishes order and association") {
  CHECK(structurally_equal(P("x1 + x2"), P("x1 + x2")));
  CHECK_FALSE(structurally_equal(P("x1 + x2"), P("x2 + x1")));
  CHECK_FALSE(structurally_equal(P("x1*(x2*x3)"), P("x1*x2*x3")));
  CHECK_FALSE(structurally_equal(P("x1"), P("inv(x1)")));
  CHECK(structurally_equal(Formula::constant(Rational(2, 4)),
                           Formula::constant(Rational(1, 2))));
}

TEST_CASE("negate_formula pins") {
  // Constants flip in place.
  CHECK(structurally_equal(negate_formula(P("5")), P("-5")));
  // Sums distribute.
  CHECK(structurally_equal(negate_formula(P("x1 + x2")), P("-x1 - x2")));
  // Products negate the left factor only.
  CHECK(structurally_equal(negate_formula(P("x1*x2")), P("-x1*x2")));
  // Variables and inverses pick up a -1 factor.
  CHECK(structurally_equal(negate_formula(P("inv(x1)")), P("-inv(x1)")));
  // The unit factor from a double negation collapses away.
  CHECK(structurally_equal(negate_formula(P("-x1")), P("x1")));
  CHECK(structurally_equal(negate_formula(negate_formula(P("x1*x2 - x2*x1"))),
                           P("x1*x2 - x2*x1")));
}

TEST_CASE("negate_formula negates semantically and preserves affineness") {
  std::mt19937_64 gen(0xabba'1234);
  std::uniform_int_distribution<int> entry(-3, 3);
  int evaluated = 0;
  for (int t = 0; t < 60; ++t) {
    FormulaPtr f = random_tree(gen, 3);
    FormulaPtr n = negate_formula(f);

    std::map<std::string, QMat> subst;
    for (const auto& v : collect_variables(f)) {
      QMat m(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = entry(gen);
      subst.emplace(v, m);
    }
    auto val = eval_formula(f, subst, 2);
    auto nval = eval_formula(n, subst, 2);
    CHECK(val.has_value() == nval.has_value());
    if (val) {
      ++evaluated;
      CHECK(*nval == -*val);
    }

    auto a = affine_form(f);
    auto na = affine_form(n);
    REQUIRE(a.has_value() == na.has_value());
    if (a) {
      CHECK(na->constant == -a->constant);
      for (const auto& [name, c] : a->coeffs) {
        REQUIRE(na->coeffs.count(name) == 1);
        CHECK(na->coeffs.at(name) == -c);
      }
    }
  }
  CHECK(evaluated >= 30);  // most draws stay inside the inversion domain
}

TEST_CASE("eval: constants act as scalar matrices") {
  auto v = eval_formula(P("5/3"), {}, 3);
  REQUIRE(v.has_value());
  CHECK(*v == QMat::identity(3) * Rational(5, 3));

  v = eval_formula(P("2 + 3*4"), {}, 2);
  REQUIRE(v.has_value());
  CHECK(*v == QMat::identity(2) * Rational(14));
}

TEST_CASE("eval: substitution semantics and precedence") {
  QMat a{{1, 1}, {0, 1}};
  QMat b{{1, 0}, {1, 1}};
  std::map<std::string, QMat> subst{{"x1", a}, {"x2", b}};

  auto v = eval_formula(P("x1 + x2*x1"), subst, 2);
  REQUIRE(v.has_value());
  CHECK(*v == a + b * a);

  v = eval_formula(P("inv(x1)"), subst, 2);
  REQUIRE(v.has_value());
  CHECK(*v == invert(a));
  CHECK(*v * a == QMat::identity(2));
}

TEST_CASE("eval: the commutator vanishes only where it must") {
  FormulaPtr comm = P("x1*x2 - x2*x1");

  // Scalars commute.
  std::map<std::string, QMat> s1{{"x1", QMat{{2}}}, {"x2", QMat{{7}}}};
  auto v = eval_formula(comm, s1, 1);
  REQUIRE(v.has_value());
  CHECK(v->is_zero());

  // Generic 2x2 matrices do not.
  std::map<std::string, QMat> s2{{"x1", QMat{{1, 1}, {0, 1}}},
                                 {"x2", QMat{{1, 0}, {1, 1}}}};
  v = eval_formula(comm, s2, 2);
  REQUIRE(v.has_value());
  CHECK_FALSE(v->is_zero());
}

TEST_CASE("eval: singular inversion leaves the domain") {
  std::map<std::string, QMat> subst{{"x1", QMat{{0}}}};
  CHECK_FALSE(eval_formula(P("inv(x1)"), subst, 1).has_value());

  // The failure propagates from a nested subterm.
  std::map<std::string, QMat> s2{{"x1", QMat{{1, 0}, {0, 1}}}};
  CHECK_FALSE(eval_formula(P("x1 + inv(x1 - x1)"), s2, 2).has_value());

  // Same formula, invertible argument: fine.
  std::map<std::string, QMat> s3{{"x1", QMat{{2, 0}, {0, 2}}}};
  CHECK(eval_formula(P("inv(x1)"), s3, 2).has_value());
}

TEST_CASE("eval guards") {
  CHECK_THROWS_AS(eval_formula(P("x1"), {}, 2), PreconditionError);
  std::map<std::string, QMat> wrong{{"x1", QMat{{1}}}};
  CHECK_THROWS_AS(eval_formula(P("x1"), wrong, 2), DimensionError);
  std::map<std::string, QMat> ok{{"x1", QMat{{1}}}};
  CHECK_THROWS_AS(eval_formula(P("x1"), ok, 0), DimensionError);
}

TEST_CASE("collect_variables sorts and deduplicates") {
  auto vars = collect_variables(P("x2*x10 + x1 - x2"));
  // Lexicographic order, so x10 sorts before x2.
  CHECK(vars == std::vector<std::string>{"x1", "x10", "x2"});
  CHECK(collect_variables(P("7/5")).empty());
  CHECK(collect_variables(P("x1 + x1*x1")) ==
        std::vector<std::string>{"x1"});
}

TEST_CASE("affine_form extracts coefficients") {
  auto a = affine_form(P("2*x1 + 3 - x2*5"));
  REQUIRE(a.has_value());
  CHECK(a->constant == 3);
  CHECK(a->coeffs.size() == 2);
  CHECK(a->coeffs.at("x1") == 2);
  CHECK(a->coeffs.at("x2") == -5);
  CHECK_FALSE(a->is_constant());
  CHECK_FALSE(a->is_zero());

  a = affine_form(P("1/2*x1*4"));
  REQUIRE(a.has_value());
  CHECK(a->coeffs.at("x1") == 2);
  CHECK(a->constant == 0);
}

TEST_CASE("affine_form cancels and classifies") {
  auto a = affine_form(P("x1 - x1"));
  REQUIRE(a.has_value());
  CHECK(a->is_zero());
  CHECK(a->is_constant());

  a = affine_form(P("0*x1"));
  REQUIRE(a.has_value());
  CHECK(a->is_zero());

  a = affine_form(P("3"));
  REQUIRE(a.has_value());
  CHECK(a->is_constant());
  CHECK_FALSE(a->is_zero());

  a = affine_form(P("x1 + 2*x1"));
  REQUIRE(a.has_value());
  CHECK(a->coeffs.at("x1") == 3);
}

TEST_CASE("affine_form rejects genuinely nonlinear formulas") {
  CHECK_FALSE(affine_form(P("x1*x2")).has_value());
  CHECK_FALSE(affine_form(P("inv(x1)")).has_value());
  // No cancellation across an inversion: this is not recognized as affine.
  CHECK_FALSE(affine_form(P("inv(x1) - inv(x1)")).has_value());
  CHECK_FALSE(affine_form(P("(x1 + 1)*(x2 + 1)")).has_value());
  // But a parenthesized affine times a constant still is.
  auto a = affine_form(P("(x1 + 1)*3"));
  REQUIRE(a.has_value());
  CHECK(a->constant == 3);
  CHECK(a->coeffs.at("x1") == 3);
}

}  // TEST_SUITE
