#include <doctest.h>

#include <random>

#include "opscale/cp_operator.hpp"
#include "opscale/errors.hpp"
#include "opscale/json_io.hpp"
#include "support/test_support.hpp"

using namespace opscale;
namespace ts = opscale::testing;

namespace {

QMat unit(int n, int i, int j) {
  QMat e(n, n);
  e(i, j) = 1;
  return e;
}

// Skew-symmetric three-dimensional example with nc-rank 3 but commutative
// rank 2: spans of E23-E32, E12-E21, E13-E31.
CPOperator skew3() {
  return CPOperator({unit(3, 1, 2) - unit(3, 2, 1), unit(3, 0, 1) - unit(3, 1, 0),
                     unit(3, 0, 2) - unit(3, 2, 0)});
}

}  // namespace

TEST_SUITE("cp_operator") {

TEST_CASE("construction validates the Kraus family") {
  CPOperator t({unit(2, 0, 0), unit(2, 0, 1)});
  CHECK(t.n() == 2);
  CHECK(t.m() == 2);
  CHECK(t.kraus().size() == 2);
  CHECK_THROWS_AS(CPOperator({}), PreconditionError);
  CHECK_THROWS_AS(CPOperator({QMat(2, 3)}), DimensionError);
  CHECK_THROWS_AS(CPOperator({QMat::identity(2), QMat::identity(3)}),
                  DimensionError);
}

TEST_CASE("apply and dual_apply on a pinned family") {
  CPOperator t({unit(2, 0, 0), unit(2, 0, 1)});
  QMat id = QMat::identity(2);
  CHECK(t.apply(id) == QMat{{2, 0}, {0, 0}});
  CHECK(t.dual_apply(id) == id);
  QMat x{{1, 2}, {2, 5}};
  // T(X) = x00 E11 + x11 E11 for this family.
  CHECK(t.apply(x) == QMat{{6, 0}, {0, 0}});
  CHECK(t.dual_apply(x) == QMat{{1, 0}, {0, 1}});
}

TEST_CASE("apply is the adjoint of dual_apply") {
  std::mt19937_64 g(301);
  CPOperator t({QMat{{1, 2}, {0, 1}}, QMat{{0, -1}, {3, 1}}, QMat{{2, 0}, {0, 0}}});
  for (int trial = 0; trial < 20; ++trial) {
    QMat x = ts::random_int_matrix(g, 2, 2, -5, 5);
    QMat y = ts::random_int_matrix(g, 2, 2, -5, 5);
    x = x + x.transpose();
    y = y + y.transpose();
    CHECK((t.apply(x) * y).trace() == (x * t.dual_apply(y)).trace());
  }
}

TEST_CASE("apply preserves positive semidefiniteness") {
  std::mt19937_64 g(302);
  CPOperator t({QMat{{1, 2, 0}, {0, 1, 1}, {0, 0, 1}},
                QMat{{0, -1, 2}, {3, 1, 0}, {1, 0, 0}}});
  for (int trial = 0; trial < 20; ++trial) {
    QMat b = ts::random_int_matrix(g, 3, 3, -4, 4);
    QMat x = b.transpose() * b;  // PSD
    QMat tx = t.apply(x);
    CHECK(tx.is_symmetric());
    for (int probe = 0; probe < 10; ++probe) {
      QMat v = ts::random_int_matrix(g, 3, 1, -6, 6);
      CHECK((v.transpose() * tx * v)(0, 0) >= 0);
    }
  }
}

TEST_CASE("linearity of apply") {
  std::mt19937_64 g(303);
  CPOperator t = skew3();
  QMat x = ts::random_int_matrix(g, 3, 3, -5, 5);
  QMat y = ts::random_int_matrix(g, 3, 3, -5, 5);
  CHECK(t.apply(x + y) == t.apply(x) + t.apply(y));
  CHECK(t.apply(x * Rational(3)) == t.apply(x) * Rational(3));
}

TEST_CASE("ds report") {
  // Identity channel is already doubly stochastic.
  CPOperator ident({QMat::identity(2)});
  DSReport r0 = ident.ds();
  CHECK(r0.ds_value == 0);
  CHECK(r0.row_gap == 0);
  CHECK(r0.col_gap == 0);

  // T(I) = 2 E11 here, so the row side deviates by diag(1, -1).
  CPOperator t({unit(2, 0, 0), unit(2, 0, 1)});
  DSReport r1 = t.ds();
  CHECK(r1.row_gap == 2);
  CHECK(r1.col_gap == 0);
  CHECK(r1.ds_value == 2);

  // The skew example sends I to 2I on both sides.
  DSReport r2 = skew3().ds();
  CHECK(r2.row_gap == 3);
  CHECK(r2.col_gap == 3);
  CHECK(r2.ds_value == 6);
}

TEST_CASE("tensor product") {
  CPOperator a({unit(2, 0, 0), unit(2, 0, 1)});
  CPOperator b = skew3();
  CPOperator ab = a.tensor(b);
  CHECK(ab.n() == 6);
  CHECK(ab.m() == a.m() * b.m());
  CHECK(ab.kraus()[0] == kron(a.kraus()[0], b.kraus()[0]));
  CHECK(tensor(a, b).kraus()[1] == ab.kraus()[1]);
  // (A tensor B)(I) = A(I) tensor B(I).
  CHECK(ab.apply(QMat::identity(6)) ==
        kron(a.apply(QMat::identity(2)), b.apply(QMat::identity(3))));
  CHECK(ab.dual_apply(QMat::identity(6)) ==
        kron(a.dual_apply(QMat::identity(2)), b.dual_apply(QMat::identity(3))));
}

TEST_CASE("Kraus basis reduction keeps a spanning subfamily") {
  QMat e11 = unit(2, 0, 0), e12 = unit(2, 0, 1);
  CPOperator fat({e11, e11, e12, e11 + e12, e12 * Rational(5)});
  CPOperator slim = fat.reduce_kraus_basis();
  CHECK(slim.m() == 2);
  CHECK(slim.kraus()[0] == e11);
  CHECK(slim.kraus()[1] == e12);

  // Never more than n^2 members afterwards.
  std::mt19937_64 g(304);
  std::vector<QMat> many;
  for (int k = 0; k < 12; ++k) many.push_back(ts::random_int_matrix(g, 2, 2, -3, 3));
  CPOperator big(many);
  CHECK(big.reduce_kraus_basis().m() <= 4);

  // All-zero family collapses to a single zero element.
  CPOperator zero({QMat::zero(2, 2), QMat::zero(2, 2)});
  CHECK(zero.reduce_kraus_basis().m() == 1);
  CHECK(zero.reduce_kraus_basis().kraus()[0].is_zero());
}

TEST_CASE("integerize clears denominators by the least common multiple") {
  QMat a{{Rational(1, 2), 0}, {0, 1}};
  QMat b{{0, Rational(2, 3)}, {0, 0}};
  auto [scaled, gamma] = CPOperator({a, b}).integerize();
  CHECK(gamma == 6);
  CHECK(scaled.kraus()[0] == QMat{{3, 0}, {0, 6}});
  CHECK(scaled.kraus()[1] == QMat{{0, 4}, {0, 0}});
  CHECK(scaled.has_integer_entries());
  CHECK_FALSE(CPOperator({a}).has_integer_entries());

  // Integer input passes through with gamma 1.
  auto [same, one] = skew3().integerize();
  CHECK(one == 1);
  CHECK(same.kraus() == skew3().kraus());
}

TEST_CASE("meta summarizes the integerized family") {
  QMat a{{Rational(1, 2), 0}, {0, 1}};
  QMat b{{0, Rational(2, 3)}, {0, 0}};
  OperatorMeta meta = CPOperator({a, b}).meta();
  CHECK(meta.m == 2);
  CHECK(meta.gamma == 6);
  CHECK(meta.max_entry == 6);   // largest integerized magnitude
  CHECK(meta.max_bits == 2);    // measured on the raw entries 1/2, 1, 2/3

  OperatorMeta skew = skew3().meta();
  CHECK(skew.m == 3);
  CHECK(skew.gamma == 1);
  CHECK(skew.max_entry == 1);
}

TEST_CASE("padding for the c-rank-decreasing reduction") {
  CPOperator t = skew3();
  CHECK_THROWS_AS(t.pad_bar(0), PreconditionError);
  CHECK_THROWS_AS(t.pad_bar(4), PreconditionError);

  // c = 1 keeps the operator as is.
  CPOperator same = t.pad_bar(1);
  CHECK(same.n() == 3);
  CHECK(same.m() == 3);
  CHECK(same.kraus() == t.kraus());

  // c = 2: dimension n + c - 1, family m + 2n(c-1), originals embedded in the
  // top-left block and elementary couplers on the border.
  CPOperator bar = t.pad_bar(2);
  CHECK(bar.n() == 4);
  CHECK(bar.m() == 3 + 2 * 3);
  for (int k = 0; k < 3; ++k) {
    const QMat& pad = bar.kraus()[k];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(pad(i, j) == t.kraus()[k](i, j));
    for (int i = 0; i < 4; ++i) {
      CHECK(pad(i, 3) == 0);
      CHECK(pad(3, i) == 0);
    }
  }
  // Couplers touch exactly one entry each, in row or column n+l.
  for (std::size_t k = 3; k < bar.kraus().size(); ++k) {
    int nonzero = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (bar.kraus()[k](i, j) != 0) {
          ++nonzero;
          CHECK((i == 3 || j == 3));
          CHECK(bar.kraus()[k](i, j) == 1);
        }
    CHECK(nonzero == 1);
  }

  CPOperator wide = t.pad_bar(3);
  CHECK(wide.n() == 5);
  CHECK(wide.m() == 3 + 2 * 3 * 2);
}

TEST_CASE("fixture operator loads into the skew example") {
  Json doc = load_json_file(ts::fixture_path("example12.json"));
  CPOperator t = operator_from_json(doc);
  CHECK(t.n() == 3);
  CHECK(t.m() == 3);
  CHECK(t.kraus() == skew3().kraus());
}

}  // TEST_SUITE
