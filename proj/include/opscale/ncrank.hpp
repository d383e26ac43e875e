#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opscale/pencil.hpp"
#include "opscale/scaling.hpp"

namespace opscale {

// Operator whose Kraus family is the coefficient list of the homogenized
// pencil, after padding a rectangular pencil square with zero rows/columns.
// The family is reduced to a linear basis when it has more than n^2 members;
// an all-zero pencil yields the zero operator.
CPOperator pencil_operator(const LinearMatrixPencil& p);

struct FullnessResult {
  bool full = false;
  std::uint64_t iterations = 0;
};

// A square pencil has nc-rank n exactly when its operator is rank
// non-decreasing.
FullnessResult fullness(const LinearMatrixPencil& p, const ScalingConfig& cfg);

struct SubVerdict {
  std::string probe;  // "c=2" for padded-operator probes, "r=2" for UMV probes
  bool full = false;
  std::uint64_t iterations = 0;
};

struct RankReport {
  int ncrank = 0;
  std::string method;
  int commutative_rank_estimate = 0;
  int trials = 0;
  std::vector<SubVerdict> subverdicts;
};

// nc-rank = n - max{c >= 0 : the c-padded operator is rank decreasing},
// located by binary search; the padding predicate is monotone in c.
RankReport ncrank_quantum(const LinearMatrixPencil& p, const ScalingConfig& cfg,
                          int estimate_trials = 7,
                          std::uint64_t seed = 20260823);

// Division-free symbolic matrix. nc-rank >= r exactly when the r x r
// compression U*M*V by fresh generic variables stays full; probes r upward
// (with a direct top probe in the square case) and linearizes each probe.
RankReport ncrank_classical(const SymbolicMatrix& m, const ScalingConfig& cfg,
                            int estimate_trials = 7,
                            std::uint64_t seed = 20260823);

// Max rank over random integer scalar substitutions, entries drawn uniformly
// from [-2n^2, 2n^2]. A lower bound on the true commutative rank with high
// probability; reported alongside nc-rank, never used for verdicts.
int commutative_rank_estimate(const LinearMatrixPencil& p, int trials,
                              std::uint64_t seed);
int commutative_rank_estimate(const SymbolicMatrix& m, int trials,
                              std::uint64_t seed);

}  // namespace opscale
