#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opscale/cp_operator.hpp"

namespace opscale {

// Arithmetic backends for the scaling iteration.
//   ExactCertified : exact rationals, no truncation. The worst-case iteration
//                    budget is certified, but entry sizes can grow fast, so a
//                    bit guard aborts runs that outgrow the budget. This mode
//                    is demonstration scale.
//   ExactCapped    : exact dyadic rationals, every iterate truncated toward
//                    zero at a fixed bit count (>= 64).
//   Float64        : plain doubles; the practical mode.
struct NumericMode {
  enum Kind { ExactCertified, ExactCapped, Float64 };
  Kind kind = Float64;
  unsigned bits = 0;  // ExactCapped only

  static NumericMode certified() { return {ExactCertified, 0}; }
  static NumericMode capped(unsigned bits);
  static NumericMode float64() { return {Float64, 0}; }

  // "exact" | "exact-capped:<bits>" | "float"
  static NumericMode parse(const std::string& text);
  std::string to_string() const;
};

struct ScalingConfig {
  NumericMode mode = NumericMode::float64();
  // Iteration budget; when absent, iteration_bound(n, m, M) for decisions and
  // the capacity budget for approx_capacity.
  std::optional<std::uint64_t> max_iterations;
  // Truncation resolution for ExactCapped; defaults to the mode's bit count.
  std::optional<unsigned> truncation_bits;
  // Crossing threshold; defaults to 1/(6n) for decisions, eps^2/(4n^3) for
  // capacity runs.
  std::optional<Rational> ds_threshold;
  // Abort ExactCertified runs whose entries exceed this many bits.
  std::uint64_t certified_bit_guard = 1u << 21;
  bool keep_sequence = false;  // retain every iterate (debug / invariants)
  bool stop_at_crossing = true;
};

enum class ScalingVerdict { RankNonDecreasing, RankDecreasing };

struct TraceRecord {
  std::uint64_t j = 0;
  double eps = 0.0;
  double log_det_accumulator = 0.0;
};

// Exact certificate for a rank decrease: a positive definite X with
// det(T(X))/det(X) = ratio strictly below floor_value, where floor_value is
// the capacity lower bound every full integer operator must satisfy. Sound in
// every numeric mode because the ratio and the comparison are evaluated in
// rational arithmetic on the exact (rationalized) iterate.
struct RankDropWitness {
  Rational ratio;
  Rational floor_value;
  std::uint64_t at = 0;  // iteration index of the witness
};

struct ScalingRun {
  ScalingVerdict verdict = ScalingVerdict::RankDecreasing;
  std::optional<std::uint64_t> first_hit;  // first j with eps_j <= threshold
  std::uint64_t iterations = 0;
  std::string mode;
  std::optional<RankDropWitness> witness;

  std::vector<double> eps_trace;
  std::vector<Rational> eps_trace_exact;  // exact modes only

  // det(U_{j-1}) * det(U_{j-2}) at the crossing (or at exhaustion), the
  // Algorithm-4 capacity accumulator.
  Rational det_accumulator = Rational(1);
  double log_det_accumulator = 0.0;

  // Inverses of the last two iterates, as exact matrices (float iterates are
  // dyadic, so the conversion is lossless). Fixed-point certification input.
  std::optional<QMat> last_inverse;       // U_{j-1}^{-1}
  std::optional<QMat> prev_inverse;      // U_{j-2}^{-1}

  // Per-iteration inequality monitors (float mode): progress counts
  // violations of det(T_j(I)) <= exp(-eps_j/6) for eps_j <= 1, det_upper of
  // det(T_j(I)) <= 1; both with 1e-9 slack.
  std::uint64_t progress_violations = 0;
  std::uint64_t det_upper_violations = 0;

  // Iterates U_{-1}, U_0, U_1, ... when keep_sequence is set.
  std::vector<QMat> sequence_exact;
  std::vector<DMat> sequence_float;
};

// Worst-case decision budget: t = 2 + ceil(144 n^2 ln(M m n)); equals 2 in
// the degenerate case M m n = 1.
std::uint64_t iteration_bound(int n, int m, const Integer& max_entry);

// Truncation bits sufficient for the capped iteration to track the idealized
// one over t steps: P = max(64, ceil(10 t^2 log2(2 alpha)) + 64) with
// alpha = (M^2 n^2 m)^(n-1); P = 64 when alpha = 1.
std::uint64_t truncation_bits(int n, int m, const Integer& max_entry,
                              std::uint64_t t);

// (M m n)^(-4n): capacity lower bound for rank-non-decreasing integer
// operators after right normalization.
Rational capacity_lower_bound(int n, int m, const Integer& max_entry);

// n^(-2n): the square integer-operator bound.
Rational capacity_lower_bound_integer_kraus(int n);

// Alternating-normalization fullness test. Early exit at the first j with
// eps_j <= threshold (rank non-decreasing); budget exhaustion means rank
// decreasing. A singular T(I) or T*(I) is an immediate step-1 verdict.
ScalingRun run_fullness_test(const CPOperator& t, const ScalingConfig& config);

struct CapacityBracket {
  Rational lower;
  Rational upper;
  Rational fixed_point_eps;
};

struct BracketResult {
  bool accepted = false;
  CapacityBracket bracket;
  std::string reject_reason;
};

// Lemma-style a-posteriori bracket: for symmetric positive definite C with
// eps = tr[(C T*(T(C)^{-1}) - I)^2] <= 1/(n+1),
//   (1 - sqrt(n eps))^n det(T(C))/det(C) <= cap(T) <= det(T(C))/det(C).
// Exact in, exact out; independent of however C was produced.
BracketResult capacity_bracket_from_fixed_point(const CPOperator& t,
                                                const QMat& c);

struct CapacityResult {
  double value = 0.0;            // 0 when no crossing in budget
  Rational value_exact;          // exact modes
  bool has_exact = false;
  std::optional<CapacityBracket> bracket;  // from fixed-point certification
  ScalingRun run;
};

// Algorithm-4 style capacity estimate to relative accuracy eps: iterate to
// threshold eps^2/(4 n^3) and report det(U_{j-1}) det(U_{j-2}), rescaled by
// the integerization factor. In float mode the result additionally carries an
// exact fixed-point bracket when certification succeeds.
CapacityResult approx_capacity(const CPOperator& t, double eps,
                               const ScalingConfig& config);

std::uint64_t capacity_iteration_bound(int n, const Integer& max_entry,
                                       double eps);

// Streaming observer hook used by the CLI trace writer.
using TraceSink = std::function<void(const TraceRecord&)>;

ScalingRun run_scaling_trace(const CPOperator& t, const ScalingConfig& config,
                             const TraceSink& sink);

}  // namespace opscale
