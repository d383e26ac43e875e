#include <doctest.h>

#include <random>
#include <vector>

#include "opscale/errors.hpp"
#include "opscale/ncrank.hpp"
#include "opscale/oracles.hpp"
#include "opscale/pencil.hpp"
#include "opscale/scaling.hpp"

using namespace opscale;
using oracle::BipartiteGraph;

namespace {

LinearMatrixPencil pencil_of(std::vector<QMat> coeffs) {
  LinearMatrixPencil p;
  p.rows = coeffs.front().rows();
  p.cols = coeffs.front().cols();
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    p.vars.push_back("x" + std::to_string(i + 1));
  }
  p.coeffs = std::move(coeffs);
  return p;
}

// 3x3 antisymmetric basis: [[0,x1,x2],[-x1,0,x3],[-x2,-x3,0]].
std::vector<QMat> skew_basis() {
  QMat a = QMat::zero(3, 3), b = QMat::zero(3, 3), c = QMat::zero(3, 3);
  a(0, 1) = 1;
  a(1, 0) = -1;
  b(0, 2) = 1;
  b(2, 0) = -1;
  c(1, 2) = 1;
  c(2, 1) = -1;
  return {a, b, c};
}

BipartiteGraph complete_graph(int n) {
  BipartiteGraph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.edges.push_back({i, j});
  return g;
}

// Independent permanent route for cross-checks: Laplace expansion along the
// first row. Exponential, but fine for the sizes used here.
Rational expansion_permanent(const QMat& a, std::vector<int> cols) {
  int row = a.rows() - static_cast<int>(cols.size());
  if (cols.empty()) return 1;
  Rational total = 0;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (a(row, cols[k]) == 0) continue;
    std::vector<int> rest;
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (j != k) rest.push_back(cols[j]);
    total += a(row, cols[k]) * expansion_permanent(a, std::move(rest));
  }
  return total;
}

Rational expansion_permanent(const QMat& a) {
  std::vector<int> cols;
  for (int j = 0; j < a.cols(); ++j) cols.push_back(j);
  return expansion_permanent(a, std::move(cols));
}

QMat random_rational_matrix(int rows, int cols, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> num(-3, 3);
  std::uniform_int_distribution<int> den(1, 3);
  QMat m = QMat::zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      // The two-integer constructor skips reduction; equality checks on the
      // results assume lowest terms.
      Rational r(num(gen), den(gen));
      r.canonicalize();
      m(i, j) = r;
    }
  return m;
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("maximum matching pins") {
  // K_{2,2}: both left vertices can be saturated.
  BipartiteGraph k22 = complete_graph(2);
  CHECK(oracle::maximum_matching(k22) == 2);
  CHECK(oracle::perfect_matching_exists(k22));

  // Hall violator: left vertices 0 and 1 only reach right vertex 0.
  BipartiteGraph hall;
  hall.n = 3;
  hall.edges = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}};
  CHECK(oracle::maximum_matching(hall) == 2);
  CHECK_FALSE(oracle::perfect_matching_exists(hall));

  BipartiteGraph empty;
  empty.n = 2;
  CHECK(oracle::maximum_matching(empty) == 0);
  CHECK_FALSE(oracle::perfect_matching_exists(empty));

  BipartiteGraph single;
  single.n = 1;
  single.edges = {{0, 0}};
  CHECK(oracle::maximum_matching(single) == 1);
  CHECK(oracle::perfect_matching_exists(single));

  // Augmenting-path case: the greedy pairing (0,0) must be rerouted to
  // saturate vertex 1, whose only neighbour is right vertex 0.
  BipartiteGraph reroute;
  reroute.n = 2;
  reroute.edges = {{0, 0}, {0, 1}, {1, 0}};
  CHECK(oracle::maximum_matching(reroute) == 2);

  BipartiteGraph zero;
  zero.n = 0;
  CHECK(oracle::maximum_matching(zero) == 0);
}

TEST_CASE("matching oracle guards") {
  BipartiteGraph neg;
  neg.n = -1;
  CHECK_THROWS_AS(oracle::maximum_matching(neg), DimensionError);

  BipartiteGraph bad;
  bad.n = 2;
  bad.edges = {{0, 2}};
  CHECK_THROWS_AS(oracle::maximum_matching(bad), PreconditionError);
  CHECK_THROWS_AS(oracle::matching_operator(bad), PreconditionError);

  BipartiteGraph none;
  none.n = 0;
  CHECK_THROWS_AS(oracle::matching_operator(none), DimensionError);
}

TEST_CASE("matching operator construction") {
  BipartiteGraph k22 = complete_graph(2);
  CPOperator t = oracle::matching_operator(k22);
  CHECK(t.n() == 2);
  CHECK(t.m() == 4);
  for (std::size_t e = 0; e < k22.edges.size(); ++e) {
    const QMat& a = t.kraus()[e];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Rational want = (i == k22.edges[e].first && j == k22.edges[e].second)
                            ? Rational(1)
                            : Rational(0);
        CHECK(a(i, j) == want);
      }
  }

  // An edgeless graph still yields a well-formed (zero) operator.
  BipartiteGraph empty;
  empty.n = 3;
  CPOperator z = oracle::matching_operator(empty);
  CHECK(z.m() == 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(z.kraus()[0](i, j) == 0);

  // Cross-module sanity: a perfect matching makes the operator rank
  // non-decreasing, a Hall violator does not.
  CHECK(run_fullness_test(t, ScalingConfig{}).verdict ==
        ScalingVerdict::RankNonDecreasing);
  BipartiteGraph hall;
  hall.n = 3;
  hall.edges = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}};
  CHECK(run_fullness_test(oracle::matching_operator(hall), ScalingConfig{})
            .verdict == ScalingVerdict::RankDecreasing);
}

TEST_CASE("permanent pins") {
  CHECK(oracle::brute_force_permanent(QMat::identity(2)) == 1);

  QMat ones2 = QMat::zero(2, 2);
  ones2(0, 0) = ones2(0, 1) = ones2(1, 0) = ones2(1, 1) = 1;
  CHECK(oracle::brute_force_permanent(ones2) == 2);

  QMat hall = QMat::zero(3, 3);
  hall(0, 0) = hall(1, 0) = hall(2, 0) = hall(2, 1) = hall(2, 2) = 1;
  CHECK(oracle::brute_force_permanent(hall) == 0);

  QMat ones3 = QMat::zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ones3(i, j) = 1;
  CHECK(oracle::brute_force_permanent(ones3) == 6);

  QMat perm = QMat::zero(3, 3);
  perm(0, 2) = perm(1, 0) = perm(2, 1) = 1;
  CHECK(oracle::brute_force_permanent(perm) == 1);

  QMat frac = QMat::zero(2, 2);
  frac(0, 0) = Rational(1, 2);
  frac(0, 1) = Rational(1, 2);
  frac(1, 0) = Rational(1, 3);
  frac(1, 1) = Rational(2, 3);
  CHECK(oracle::brute_force_permanent(frac) == Rational(1, 2));

  QMat one = QMat::zero(1, 1);
  one(0, 0) = 5;
  CHECK(oracle::brute_force_permanent(one) == 5);
  one(0, 0) = 0;
  CHECK(oracle::brute_force_permanent(one) == 0);

  CHECK_THROWS_AS(oracle::brute_force_permanent(QMat::zero(2, 3)),
                  DimensionError);
  CHECK_THROWS_AS(oracle::brute_force_permanent(QMat::zero(9, 9)),
                  PreconditionError);
}

TEST_CASE("permanent agrees with Laplace expansion") {
  std::mt19937_64 gen(0x9e37);
  for (int t = 0; t < 30; ++t) {
    QMat m = random_rational_matrix(4, 4, gen);
    CHECK(oracle::brute_force_permanent(m) == expansion_permanent(m));
  }
  for (int t = 0; t < 8; ++t) {
    QMat m = random_rational_matrix(5, 5, gen);
    CHECK(oracle::brute_force_permanent(m) == expansion_permanent(m));
  }
}

TEST_CASE("capacity oracle pins") {
  CHECK(oracle::brute_force_capacity(CPOperator({QMat::identity(2)})) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(oracle::brute_force_capacity(CPOperator({QMat::identity(3)})) ==
        doctest::Approx(1.0).epsilon(1e-3));

  QMat e11 = QMat::zero(2, 2), e22 = QMat::zero(2, 2);
  e11(0, 0) = 1;
  e22(1, 1) = 1;
  CHECK(oracle::brute_force_capacity(CPOperator({e11, e22})) ==
        doctest::Approx(1.0).epsilon(1e-3));

  // Scaling the single Kraus element by c multiplies the objective by c^(2n).
  CHECK(oracle::brute_force_capacity(
            CPOperator({QMat::identity(2) * Rational(2)})) ==
        doctest::Approx(16.0).epsilon(1e-5));

  CHECK(oracle::brute_force_capacity(CPOperator(skew_basis())) ==
        doctest::Approx(8.0).epsilon(1e-4));

  // n = 1 short-circuits the optimizer: the objective is sum of squares.
  QMat two = QMat::zero(1, 1), three = QMat::zero(1, 1);
  two(0, 0) = 2;
  three(0, 0) = 3;
  CHECK(oracle::brute_force_capacity(CPOperator({two, three})) == 13.0);

  CHECK_THROWS_AS(oracle::brute_force_capacity(CPOperator({QMat::zero(5, 5)})),
                  PreconditionError);
}

TEST_CASE("capacity oracle is deterministic for a fixed seed") {
  CPOperator t(skew_basis());
  double a = oracle::brute_force_capacity(t, 8, 123);
  double b = oracle::brute_force_capacity(t, 8, 123);
  CHECK(a == b);
  // More starts can only find an equal or smaller minimum.
  double wide = oracle::brute_force_capacity(t, 32, 123);
  CHECK(wide <= a + 1e-12);
}

TEST_CASE("capacity oracle dominates the certified lower bound") {
  struct Instance {
    CPOperator t;
    Integer max_entry;
  };
  QMat swap = QMat::zero(2, 2);
  swap(0, 1) = 1;
  swap(1, 0) = 1;
  std::vector<Instance> instances;
  instances.push_back({CPOperator({QMat::identity(2)}), 1});
  instances.push_back({CPOperator({QMat::identity(2) * Rational(2)}), 2});
  instances.push_back({CPOperator(skew_basis()), 1});
  instances.push_back({CPOperator({QMat::identity(2), swap}), 1});
  instances.push_back({oracle::matching_operator(complete_graph(2)), 1});
  instances.push_back({oracle::matching_operator(complete_graph(3)), 1});

  for (const auto& inst : instances) {
    // The bound only applies to rank non-decreasing operators.
    REQUIRE(run_fullness_test(inst.t, ScalingConfig{}).verdict ==
            ScalingVerdict::RankNonDecreasing);
    Rational bound =
        capacity_lower_bound(inst.t.n(), inst.t.m(), inst.max_entry);
    double brute = oracle::brute_force_capacity(inst.t);
    CHECK(brute >= bound.get_d());
  }
}

TEST_CASE("plain elimination determinant pins") {
  QMat a = QMat::zero(3, 3);
  a(0, 1) = 1;
  a(0, 2) = 2;
  a(1, 0) = 1;
  a(1, 2) = 3;
  a(2, 0) = 4;
  a(2, 1) = 5;
  a(2, 2) = 6;
  CHECK(oracle::plain_gauss_det(a) == 16);

  // A lone transposition exercises the pivot-swap sign flip.
  QMat swap = QMat::zero(2, 2);
  swap(0, 1) = 1;
  swap(1, 0) = 1;
  CHECK(oracle::plain_gauss_det(swap) == -1);

  QMat rank1 = QMat::zero(2, 2);
  rank1(0, 0) = 1;
  rank1(0, 1) = 2;
  rank1(1, 0) = 2;
  rank1(1, 1) = 4;
  CHECK(oracle::plain_gauss_det(rank1) == 0);

  QMat frac = QMat::zero(2, 2);
  frac(0, 0) = Rational(1, 2);
  frac(0, 1) = Rational(1, 3);
  frac(1, 0) = Rational(1, 4);
  frac(1, 1) = Rational(1, 5);
  CHECK(oracle::plain_gauss_det(frac) == Rational(1, 60));

  QMat one = QMat::zero(1, 1);
  one(0, 0) = 7;
  CHECK(oracle::plain_gauss_det(one) == 7);

  CHECK(oracle::plain_gauss_det(QMat::identity(4)) == 1);
  CHECK_THROWS_AS(oracle::plain_gauss_det(QMat::zero(2, 3)), DimensionError);
}

TEST_CASE("plain elimination agrees with fraction-free determinant") {
  std::mt19937_64 gen(0xde7e);
  for (int t = 0; t < 25; ++t) {
    QMat m = random_rational_matrix(4, 4, gen);
    CHECK(oracle::plain_gauss_det(m) == det(m));
  }
  for (int t = 0; t < 10; ++t) {
    QMat m = random_rational_matrix(5, 5, gen);
    CHECK(oracle::plain_gauss_det(m) == det(m));
  }
  // Force singular inputs through both routes too.
  for (int t = 0; t < 10; ++t) {
    QMat m = random_rational_matrix(4, 4, gen);
    for (int j = 0; j < 4; ++j) m(3, j) = m(0, j) + m(1, j);
    CHECK(oracle::plain_gauss_det(m) == 0);
    CHECK(det(m) == 0);
  }
}

TEST_CASE("blow-up pins and the scalar evaluation gap") {
  CHECK(oracle::blowup_nonsingular(pencil_of({QMat::identity(2)})));
  CHECK_FALSE(oracle::blowup_nonsingular(pencil_of({QMat::zero(2, 2)})));

  // The antisymmetric pencil vanishes under every scalar substitution (odd
  // dimension), yet a 2x2 matrix substitution is nonsingular.
  LinearMatrixPencil skew = pencil_of(skew_basis());
  CHECK(oracle::blowup_nonsingular(skew));
  std::mt19937_64 gen(0x5ca1a);
  std::uniform_int_distribution<int> entry(-5, 5);
  for (int t = 0; t < 20; ++t) {
    std::vector<Rational> point;
    for (int v = 0; v < 3; ++v) point.push_back(entry(gen));
    CHECK(oracle::plain_gauss_det(eval_pencil(skew, point)) == 0);
  }

  LinearMatrixPencil rect;
  rect.rows = 2;
  rect.cols = 3;
  rect.vars = {"x1"};
  rect.coeffs = {QMat::zero(2, 3)};
  CHECK_THROWS_AS(oracle::blowup_nonsingular(rect), DimensionError);

  // Same seed, same verdict.
  CHECK(oracle::blowup_nonsingular(skew, 7, 99) ==
        oracle::blowup_nonsingular(skew, 7, 99));
}

TEST_CASE("blow-up verdict matches the scaling verdict") {
  std::mt19937_64 gen(0xb10b);
  std::uniform_int_distribution<int> entry(-1, 1);
  int full_count = 0, singular_count = 0;
  for (int t = 0; t < 200; ++t) {
    int n = 1 + t % 5;
    int nvars = 1 + (t / 5) % 3;
    bool sparse = t % 3 == 0;
    LinearMatrixPencil p;
    p.rows = p.cols = n;
    for (int v = 0; v < nvars; ++v) {
      QMat c = QMat::zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (sparse && (i + j) % 2 == 0) continue;
          c(i, j) = entry(gen);
        }
      p.vars.push_back("x" + std::to_string(v + 1));
      p.coeffs.push_back(std::move(c));
    }
    bool oracle_full = oracle::blowup_nonsingular(p);
    bool scale_full;
    try {
      scale_full = fullness(p, ScalingConfig{}).full;
    } catch (const PrecisionExhausted&) {
      ScalingConfig cfg;
      cfg.mode = NumericMode::capped(256);
      scale_full = fullness(p, cfg).full;
    }
    CHECK(oracle_full == scale_full);
    (oracle_full ? full_count : singular_count)++;
  }
  // The corpus must exercise both verdicts, not just one.
  CHECK(full_count >= 60);
  CHECK(singular_count >= 40);
}

TEST_CASE("positive permanent characterizes perfect matchings") {
  long checked = 0;
  for (int n = 1; n <= 4; ++n) {
    int cells = n * n;
    for (long mask = 0; mask < (1L << cells); ++mask) {
      QMat m = QMat::zero(n, n);
      BipartiteGraph g;
      g.n = n;
      for (int c = 0; c < cells; ++c)
        if (mask >> c & 1) {
          int i = c / n, j = c % n;
          m(i, j) = 1;
          g.edges.push_back({i, j});
        }
      bool positive = oracle::brute_force_permanent(m) > 0;
      bool matched = oracle::perfect_matching_exists(g);
      if (positive != matched) {
        CAPTURE(n);
        CAPTURE(mask);
        REQUIRE(positive == matched);
      }
      ++checked;
    }
  }
  CHECK(checked == 2 + 16 + 512 + 65536);
}

}  // TEST_SUITE
