#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "opscale/cp_operator.hpp"
#include "opscale/pencil.hpp"

// Reference implementations used only to cross-check the main algorithms.
// They take deliberately different routes: plain fraction elimination instead
// of the fraction-free determinant, direct minimization instead of scaling,
// augmenting paths instead of normalization counts.
namespace opscale::oracle {

struct BipartiteGraph {
  int n = 0;                                // vertices per side
  std::vector<std::pair<int, int>> edges;   // 0-based (left, right)
};

int maximum_matching(const BipartiteGraph& g);
bool perfect_matching_exists(const BipartiteGraph& g);

// Operator with one elementary-matrix Kraus element per edge.
CPOperator matching_operator(const BipartiteGraph& g);

// Exact permanent by inclusion-exclusion over column subsets; n <= 8.
Rational brute_force_permanent(const QMat& a);

// inf det T(X) over positive definite X with det X = 1, minimized directly:
// Cholesky parameterization with log-scaled diagonal, Nelder-Mead descent
// from `starts` starting points. Float result; n <= 4.
double brute_force_capacity(const CPOperator& t, int starts = 32,
                            std::uint64_t seed = 20260823);

// Whether some integer blow-up of dimension max(1, n-1) evaluates the square
// pencil to an invertible matrix. Entries drawn uniformly from [-2n^2, 2n^2];
// the determinant is computed exactly by plain fraction elimination.
bool blowup_nonsingular(const LinearMatrixPencil& p, int trials = 7,
                        std::uint64_t seed = 20260823);

// Textbook fraction Gaussian elimination with partial (first nonzero) pivot.
Rational plain_gauss_det(QMat a);

}  // namespace opscale::oracle
