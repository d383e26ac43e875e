#include "opscale/scaling.hpp"

#include <cmath>
#include <limits>
#include <type_traits>

namespace opscale {

namespace {

constexpr double kFloatSlack = 1e-12;   // threshold comparisons in float mode
constexpr double kMonitorSlack = 1e-9;  // inequality monitors

double log2_mpz(const Integer& z) {
  signed long exp2 = 0;
  double d = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log2(d) + static_cast<double>(exp2);
}

double ln_mpz(const Integer& z) { return log2_mpz(z) * std::log(2.0); }

template <typename S>
struct Triplet {
  int row;
  int col;
  S value;
};

// Sparse Kraus application: T(X) = sum_i A_i X A_i^T (or the dual with A_i
// transposed). The pencil-derived operators are very sparse, and the scaling
// loop lives inside this kernel.
template <typename S>
class SparseOperator {
 public:
  SparseOperator(const CPOperator& op, bool integer_form) {
    n_ = op.n();
    const std::vector<QMat>& kraus = op.kraus();
    ops_.resize(kraus.size());
    for (std::size_t k = 0; k < kraus.size(); ++k) {
      const QMat& a = kraus[k];
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
          if (a(i, j) == 0) continue;
          if constexpr (std::is_same_v<S, Rational>)
            ops_[k].push_back({i, j, a(i, j)});
          else
            ops_[k].push_back({i, j, to_double(a(i, j))});
        }
    }
    (void)integer_form;
  }

  Matrix<S> apply(const Matrix<S>& x, bool dual) const {
    Matrix<S> out(n_, n_);
    Matrix<S> b(n_, n_);
    for (const auto& trips : ops_) {
      for (auto& v : b.data()) v = S(0);
      // b = A x (or A^T x for the dual)
      for (const auto& t : trips) {
        const int r = dual ? t.col : t.row;
        const int c = dual ? t.row : t.col;
        for (int j = 0; j < n_; ++j) b(r, j) += t.value * x(c, j);
      }
      // out += b A^T (or b A)
      for (const auto& t : trips) {
        const int r = dual ? t.col : t.row;
        const int c = dual ? t.row : t.col;
        for (int i = 0; i < n_; ++i) out(i, r) += b(i, c) * t.value;
      }
    }
    return out;
  }

  int n() const { return n_; }

 private:
  int n_;
  std::vector<std::vector<Triplet<S>>> ops_;
};

struct EngineParams {
  Rational threshold;
  std::uint64_t max_iterations = 0;
  std::optional<unsigned> trunc_bits;  // exact modes only
  std::uint64_t bit_guard = 0;         // 0 disables
  bool stop_at_crossing = true;
  bool keep_sequence = false;
  const TraceSink* sink = nullptr;

  // Early rank-decrease certificate. A full integer operator has capacity at
  // least (Mmn)^{-4n}, and det(T(X))/det(X) upper-bounds the capacity for
  // every PD X. When that witness ratio, evaluated exactly at an iterate,
  // drops below capacity_floor (pre-scaled by the integerization factor when
  // the engine runs the raw operator), the operator is certified
  // rank-decreasing without exhausting the iteration budget.
  std::optional<Rational> capacity_floor;
  double ln_floor = 0.0;               // natural log of capacity_floor
  const CPOperator* confirm_op = nullptr;  // exact Kraus data for the confirm
};

double ln_positive_rational(const Rational& q) {
  signed long e_num = 0;
  signed long e_den = 0;
  double num = mpz_get_d_2exp(&e_num, q.get_num().get_mpz_t());
  double den = mpz_get_d_2exp(&e_den, q.get_den().get_mpz_t());
  return (std::log2(num) - std::log2(den) +
          static_cast<double>(e_num - e_den)) *
         std::log(2.0);
}

double ln_positive_det(const Rational& q) { return ln_positive_rational(q); }
double ln_positive_det(double v) {
  return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

template <typename S>
S scalar_from_rational(const Rational& q) {
  if constexpr (std::is_same_v<S, Rational>)
    return q;
  else
    return to_double(q);
}

double scalar_to_double(const Rational& v) { return to_double(v); }
double scalar_to_double(double v) { return v; }

QMat exactify(const QMat& m) { return m; }
QMat exactify(const DMat& m) { return to_exact(m); }

template <typename S>
void guard_entry_bits(const Matrix<S>& u, std::uint64_t bit_guard,
                      std::uint64_t j) {
  if constexpr (std::is_same_v<S, Rational>) {
    if (bit_guard == 0) return;
    for (const auto& v : u.data()) {
      if (bit_size(v) > bit_guard)
        throw PrecisionExhausted(
            "certified run exceeded the entry bit budget at iteration " +
            std::to_string(j) +
            "; rerun in exact-capped mode with a chosen bit count");
    }
  }
}

template <typename S>
ScalingRun scale_engine(const CPOperator& op, const EngineParams& p) {
  constexpr bool exact = std::is_same_v<S, Rational>;
  using Mat = Matrix<S>;
  const int n = op.n();
  SparseOperator<S> sparse(op, exact);

  ScalingRun run;
  const S threshold = scalar_from_rational<S>(p.threshold);

  Mat u_prev2 = Mat::identity(n);  // U_{j-2}
  Mat inv_prev2 = Mat::identity(n);
  S det_prev2 = S(1);
  Mat u_prev = sparse.apply(Mat::identity(n), /*dual=*/true);  // U_0 = T*(I)

  if (p.keep_sequence) {
    if constexpr (exact) {
      run.sequence_exact.push_back(exactify(u_prev2));
      run.sequence_exact.push_back(exactify(u_prev));
    } else {
      run.sequence_float.push_back(u_prev2);
      run.sequence_float.push_back(u_prev);
    }
  }

  auto factor_or_fail = [&](const Mat& u, std::uint64_t j, bool truncated)
      -> LdlFactorization<S> {
    LdlFactorization<S> f = ldl_factor(u);
    if (!f.positive_definite) {
      if constexpr (exact) {
        if (!truncated) {
          // Exact arithmetic: a zero pivot certifies det T(X) = 0 for a
          // positive definite X, hence capacity 0 and a rank decrease.
          run.verdict = ScalingVerdict::RankDecreasing;
          run.iterations = j;
          f.failure_index = -2;  // sentinel consumed by the caller
          return f;
        }
        throw PrecisionExhausted(
            "iterate lost positive definiteness under truncation at iteration " +
            std::to_string(j) + "; raise --mode exact-capped bits");
      } else {
        throw PrecisionExhausted(
            "float iterate lost positive definiteness at iteration " +
            std::to_string(j) + "; switch to an exact mode");
      }
    }
    return f;
  };

  LdlFactorization<S> f_prev = factor_or_fail(u_prev, 0, false);
  if (f_prev.failure_index == -2) return run;  // U_0 singular: rank decreasing
  Mat inv_prev = f_prev.inverse();
  S det_prev = f_prev.determinant();

  for (std::uint64_t j = 1; j <= p.max_iterations; ++j) {
    const bool odd = (j % 2) == 1;
    Mat next = sparse.apply(inv_prev, /*dual=*/!odd);
    bool truncated = false;
    if constexpr (exact) {
      if (p.trunc_bits) {
        next = truncate_entries(next, *p.trunc_bits);
        truncated = true;
      }
      guard_entry_bits(next, p.bit_guard, j);
    } else {
      // Symmetrize to keep rounding drift from accumulating.
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          double avg = (next(a, b) + next(b, a)) / 2.0;
          next(a, b) = avg;
          next(b, a) = avg;
        }
    }

    LdlFactorization<S> f_next = factor_or_fail(next, j, truncated);
    if (f_next.failure_index == -2) return run;
    S det_next = f_next.determinant();

    // eps_j = tr[(U_{j-2}^{-1} U_j - I)^2]
    Mat prod = inv_prev2 * next;
    S eps = trace_sq_deviation(prod);

    const double eps_d = scalar_to_double(eps);
    if (!exact && !std::isfinite(eps_d))
      throw PrecisionExhausted("non-finite defect at iteration " +
                               std::to_string(j) + "; switch to an exact mode");
    run.eps_trace.push_back(eps_d);
    if constexpr (exact) run.eps_trace_exact.push_back(eps);
    run.iterations = j;

    const double det_prev_d = scalar_to_double(det_prev);
    const double det_prev2_d = scalar_to_double(det_prev2);
    const double log_acc = std::log(det_prev_d) + std::log(det_prev2_d);
    run.log_det_accumulator = log_acc;

    if constexpr (!exact) {
      // det(T_j(I)) = det(U_j)/det(U_{j-2}) for both parities.
      const double ratio = scalar_to_double(det_next) / det_prev2_d;
      if (ratio > 1.0 + kMonitorSlack) ++run.det_upper_violations;
      if (eps_d <= 1.0 && ratio > std::exp(-eps_d / 6.0) * (1.0 + kMonitorSlack))
        ++run.progress_violations;
    }

    if (p.sink && *p.sink) (*p.sink)({j, eps_d, log_acc});
    if (p.keep_sequence) {
      if constexpr (exact)
        run.sequence_exact.push_back(next);
      else
        run.sequence_float.push_back(next);
    }

    bool crossed;
    if constexpr (exact)
      crossed = eps <= scalar_from_rational<S>(p.threshold);
    else
      crossed = eps_d <= scalar_to_double(threshold) * (1.0 + kFloatSlack);

    if (crossed && !run.first_hit) {
      run.first_hit = j;
      run.verdict = ScalingVerdict::RankNonDecreasing;
      if constexpr (exact) {
        run.det_accumulator = det_prev * det_prev2;
      } else {
        run.det_accumulator = from_double(det_prev_d * det_prev2_d);
      }
      run.last_inverse = exactify(inv_prev);
      run.prev_inverse = exactify(inv_prev2);
      if (p.stop_at_crossing) return run;
    }

    if (p.capacity_floor && !run.first_hit) {
      bool certified = false;
      Rational ratio;
      if constexpr (exact) {
        if (!p.trunc_bits) {
          // Untruncated engine: next is exactly T_j(U_{j-1}^{-1}), so the
          // witness ratio det(T(X)) * det(U_{j-1}) is already in hand.
          ratio = det_next * det_prev;
          certified = ratio < *p.capacity_floor;
        }
      }
      if (!certified && p.confirm_op && (!exact || p.trunc_bits.has_value())) {
        // Cheap log-scale screen on the (truncated / float) determinants;
        // 2 nats of slack forgive the truncation wobble near the floor.
        double shadow =
            ln_positive_det(det_next) + ln_positive_det(det_prev);
        if (shadow < p.ln_floor + 2.0) {
          QMat u_exact = exactify(u_prev);
          LdlFactorization<Rational> fu = ldl_factor(u_exact);
          if (fu.positive_definite) {
            QMat x = fu.inverse();
            QMat v = odd ? p.confirm_op->apply(x) : p.confirm_op->dual_apply(x);
            LdlFactorization<Rational> fv = ldl_factor(v);
            if (!fv.positive_definite) {
              ratio = Rational(0);  // det T(X) = 0 at a PD X: capacity is 0
              certified = true;
            } else {
              ratio = fv.determinant() * fu.determinant();
              certified = ratio < *p.capacity_floor;
            }
          }
        }
      }
      if (certified) {
        run.verdict = ScalingVerdict::RankDecreasing;
        run.iterations = j;
        run.witness = RankDropWitness{ratio, *p.capacity_floor, j};
        run.last_inverse = exactify(inv_prev);
        run.prev_inverse = exactify(inv_prev2);
        return run;
      }
    }

    u_prev2 = std::move(u_prev);
    inv_prev2 = std::move(inv_prev);
    det_prev2 = det_prev;
    u_prev = std::move(next);
    inv_prev = f_next.inverse();
    det_prev = det_next;
  }

  if (!run.first_hit) {
    run.verdict = ScalingVerdict::RankDecreasing;
    if constexpr (exact) {
      run.det_accumulator = det_prev * det_prev2;
    } else {
      run.det_accumulator =
          from_double(scalar_to_double(det_prev) * scalar_to_double(det_prev2));
    }
    // Keep the log-scale mirror on the same iterate pair as the exact value.
    run.log_det_accumulator = std::log(scalar_to_double(det_prev)) +
                              std::log(scalar_to_double(det_prev2));
    run.last_inverse = exactify(inv_prev);
    run.prev_inverse = exactify(inv_prev2);
  }
  return run;
}

ScalingRun dispatch_engine(const CPOperator& op, const NumericMode& mode,
                           const EngineParams& params) {
  ScalingRun run;
  switch (mode.kind) {
    case NumericMode::ExactCertified:
      run = scale_engine<Rational>(op, params);
      break;
    case NumericMode::ExactCapped:
      run = scale_engine<Rational>(op, params);
      break;
    case NumericMode::Float64:
      run = scale_engine<double>(op, params);
      break;
  }
  run.mode = mode.to_string();
  return run;
}

// Exact dets of T(I) and T*(I); the step-one singularity screen for every
// mode, so the decision does not depend on rounding.
bool step_one_singular(const CPOperator& op) {
  QMat id = QMat::identity(op.n());
  if (det(op.apply(id)) == 0) return true;
  if (det(op.dual_apply(id)) == 0) return true;
  return false;
}

EngineParams make_params(const ScalingConfig& cfg, const Rational& threshold,
                         std::uint64_t budget, const TraceSink* sink) {
  EngineParams p;
  p.threshold = threshold;
  p.max_iterations = cfg.max_iterations.value_or(budget);
  if (cfg.mode.kind == NumericMode::ExactCapped)
    p.trunc_bits = cfg.truncation_bits.value_or(cfg.mode.bits);
  if (cfg.mode.kind == NumericMode::ExactCertified)
    p.bit_guard = cfg.certified_bit_guard;
  p.stop_at_crossing = cfg.stop_at_crossing;
  p.keep_sequence = cfg.keep_sequence;
  p.sink = sink;
  return p;
}

}  // namespace

NumericMode NumericMode::capped(unsigned bits) {
  if (bits < 64)
    throw PreconditionError("exact-capped mode needs at least 64 bits");
  return {ExactCapped, bits};
}

NumericMode NumericMode::parse(const std::string& text) {
  if (text == "exact") return certified();
  if (text == "float") return float64();
  const std::string prefix = "exact-capped:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string digits = text.substr(prefix.size());
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("bad bit count in mode \"" + text + "\"", prefix.size());
    unsigned long bits = std::stoul(digits);
    return capped(static_cast<unsigned>(bits));
  }
  throw ParseError("unknown numeric mode \"" + text + "\"", 0);
}

std::string NumericMode::to_string() const {
  switch (kind) {
    case ExactCertified:
      return "exact";
    case ExactCapped:
      return "exact-capped:" + std::to_string(bits);
    case Float64:
      return "float";
  }
  return "float";
}

std::uint64_t iteration_bound(int n, int m, const Integer& max_entry) {
  if (n < 1 || m < 1 || max_entry < 1)
    throw PreconditionError("iteration_bound: need n, m, M >= 1");
  Integer prod = max_entry * m * n;
  if (prod == 1) return 2;
  double v = 144.0 * n * n * ln_mpz(prod);
  return 2 + static_cast<std::uint64_t>(std::ceil(v));
}

std::uint64_t truncation_bits(int n, int m, const Integer& max_entry,
                              std::uint64_t t) {
  if (n < 1 || m < 1 || max_entry < 1)
    throw PreconditionError("truncation_bits: need n, m, M >= 1");
  Integer base = max_entry * max_entry * n * n * m;
  Integer alpha;
  mpz_pow_ui(alpha.get_mpz_t(), base.get_mpz_t(),
             static_cast<unsigned long>(n - 1));
  if (alpha == 1) return 64;
  Integer two_alpha = 2 * alpha;
  double bits;
  if (mpz_popcount(two_alpha.get_mpz_t()) == 1) {
    bits = static_cast<double>(mpz_sizeinbase(two_alpha.get_mpz_t(), 2) - 1);
  } else {
    bits = log2_mpz(two_alpha);
  }
  double p = 10.0 * static_cast<double>(t) * static_cast<double>(t) * bits;
  double ceiling = std::ceil(p);
  if (ceiling >= 9.0e18) throw Error("truncation_bits: budget overflow");
  std::uint64_t out = static_cast<std::uint64_t>(ceiling) + 64;
  return out < 64 ? 64 : out;
}

Rational capacity_lower_bound(int n, int m, const Integer& max_entry) {
  if (n < 1 || m < 1 || max_entry < 1)
    throw PreconditionError("capacity_lower_bound: need n, m, M >= 1");
  Rational base(max_entry * m * n);
  return pow_rational(base, -4L * n);
}

Rational capacity_lower_bound_integer_kraus(int n) {
  if (n < 1) throw PreconditionError("capacity_lower_bound: need n >= 1");
  return pow_rational(Rational(n), -2L * n);
}

std::uint64_t capacity_iteration_bound(int n, const Integer& max_entry,
                                       double eps) {
  if (n < 1 || max_entry < 1 || eps <= 0.0 || eps >= 1.0)
    throw PreconditionError("capacity_iteration_bound: need n, M >= 1, eps in (0,1)");
  Integer mn = max_entry * n;
  double v = (4.0 * n * n * n / (eps * eps)) * (1.0 + 10.0 * n * n * ln_mpz(mn));
  double ceiling = std::ceil(v);
  if (ceiling >= 9.0e18) throw Error("capacity_iteration_bound: overflow");
  return static_cast<std::uint64_t>(ceiling);
}

ScalingRun run_fullness_test(const CPOperator& t, const ScalingConfig& config) {
  const int n = t.n();
  ScalingRun run;
  run.mode = config.mode.to_string();
  if (n == 1) {
    bool all_zero = true;
    for (const auto& a : t.kraus())
      if (a(0, 0) != 0) all_zero = false;
    run.verdict = all_zero ? ScalingVerdict::RankDecreasing
                           : ScalingVerdict::RankNonDecreasing;
    if (!all_zero) run.first_hit = 0;
    return run;
  }
  if (step_one_singular(t)) {
    run.verdict = ScalingVerdict::RankDecreasing;
    return run;
  }
  CPOperator op = t;
  if (config.mode.kind != NumericMode::Float64) op = t.integerize().first;
  OperatorMeta meta = op.meta();
  const Rational threshold =
      config.ds_threshold.value_or(Rational(1, 6 * static_cast<long>(n)));
  const std::uint64_t budget = iteration_bound(n, meta.m, meta.max_entry);
  EngineParams params = make_params(config, threshold, budget, nullptr);
  if (meta.max_entry >= 1) {
    // Witness floor for the operator the engine actually runs: when the run
    // uses the raw rational operator (float mode), the integerization factor
    // gamma rescales the integer-operator bound by gamma^(-2n).
    Rational floor_run = capacity_lower_bound(n, meta.m, meta.max_entry);
    if (meta.gamma != 1)
      floor_run *= pow_rational(Rational(meta.gamma), -2L * n);
    params.capacity_floor = floor_run;
    params.ln_floor = ln_positive_rational(floor_run);
    params.confirm_op = &op;
  }
  ScalingRun out = dispatch_engine(op, config.mode, params);
  out.mode = config.mode.to_string();
  return out;
}

BracketResult capacity_bracket_from_fixed_point(const CPOperator& t,
                                                const QMat& c) {
  const int n = t.n();
  if (c.rows() != n || c.cols() != n)
    throw DimensionError("capacity bracket: C has wrong dimension");
  if (!c.is_symmetric())
    throw PreconditionError("capacity bracket: C must be symmetric");
  LdlFactorization<Rational> fc = ldl_factor(c);
  if (!fc.positive_definite)
    throw PreconditionError("capacity bracket: C must be positive definite");

  BracketResult result;
  QMat tc = t.apply(c);
  LdlFactorization<Rational> ftc = ldl_factor(tc);
  if (!ftc.positive_definite) {
    result.reject_reason = "T(C) is singular (capacity 0 along this direction)";
    return result;
  }
  QMat tc_inv = ftc.inverse();
  QMat fixed = c * t.dual_apply(tc_inv);
  Rational eps = trace_sq_deviation(fixed);
  result.bracket.fixed_point_eps = eps;
  if (eps > Rational(1, n + 1)) {
    result.reject_reason =
        "fixed-point residual " + to_string(eps) + " exceeds 1/(n+1)";
    return result;
  }
  Rational upper = ftc.determinant() / fc.determinant();
  Rational s = sqrt_upper_bound(Rational(n) * eps);
  Rational lower =
      s >= 1 ? Rational(0) : pow_rational(Rational(1) - s, n) * upper;
  result.accepted = true;
  result.bracket.lower = lower;
  result.bracket.upper = upper;
  return result;
}

CapacityResult approx_capacity(const CPOperator& t, double eps,
                               const ScalingConfig& config) {
  if (!(eps > 0.0) || eps >= 1.0)
    throw PreconditionError("approx_capacity: eps must lie in (0, 1)");
  const int n = t.n();
  CapacityResult result;
  result.run.mode = config.mode.to_string();

  if (n == 1) {
    Rational cap(0);
    for (const auto& a : t.kraus()) cap += a(0, 0) * a(0, 0);
    result.value_exact = cap;
    result.has_exact = true;
    result.value = to_double(cap);
    result.run.verdict = cap == 0 ? ScalingVerdict::RankDecreasing
                                  : ScalingVerdict::RankNonDecreasing;
    return result;
  }

  auto [op, gamma] = t.integerize();
  const Rational rescale = pow_rational(Rational(gamma), -2L * n);

  if (step_one_singular(op)) {
    result.run.verdict = ScalingVerdict::RankDecreasing;
    result.value = 0.0;
    result.value_exact = Rational(0);
    result.has_exact = config.mode.kind != NumericMode::Float64;
    return result;
  }

  OperatorMeta meta = op.meta();
  Rational eps_q = from_double(eps);
  const Rational threshold = config.ds_threshold.value_or(
      eps_q * eps_q / Rational(4 * static_cast<long>(n) * n * n));
  const std::uint64_t budget =
      capacity_iteration_bound(n, meta.max_entry, eps);
  EngineParams params = make_params(config, threshold, budget, nullptr);
  if (meta.max_entry >= 1) {
    // op is already integerized here, so the floor applies unscaled.
    Rational floor_run = capacity_lower_bound(n, meta.m, meta.max_entry);
    params.capacity_floor = floor_run;
    params.ln_floor = ln_positive_rational(floor_run);
    params.confirm_op = &op;
  }
  ScalingRun run = dispatch_engine(op, config.mode, params);
  run.mode = config.mode.to_string();

  if (run.verdict != ScalingVerdict::RankNonDecreasing) {
    result.run = std::move(run);
    result.value = 0.0;
    result.value_exact = Rational(0);
    result.has_exact = config.mode.kind != NumericMode::Float64;
    return result;
  }

  Rational raw = run.det_accumulator * rescale;
  result.value = to_double(raw);
  if (config.mode.kind != NumericMode::Float64) {
    result.value_exact = raw;
    result.has_exact = true;
  }

  if (config.mode.kind == NumericMode::Float64) {
    // A-posteriori certification: the bracket is evaluated exactly at the
    // rationalized final iterates, so its guarantee is independent of the
    // float rounding along the way. Try U_{j-2}^{-1} first, then U_{j-1}^{-1}
    // (crossing parity decides which one sits nearer the fixed point).
    std::optional<CapacityBracket> best;
    for (const std::optional<QMat>* cand : {&run.prev_inverse, &run.last_inverse}) {
      if (!cand->has_value()) continue;
      QMat c = cand->value();
      // Symmetrize exactly; float symmetrization can leave dust.
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          Rational avg = (c(i, j) + c(j, i)) / 2;
          c(i, j) = avg;
          c(j, i) = avg;
        }
      if (!is_positive_definite(c)) continue;
      BracketResult br = capacity_bracket_from_fixed_point(op, c);
      if (!br.accepted) continue;
      if (!best || br.bracket.fixed_point_eps < best->fixed_point_eps)
        best = br.bracket;
    }
    if (best) {
      best->lower *= rescale;
      best->upper *= rescale;
      result.bracket = best;
    }
  }

  result.run = std::move(run);
  return result;
}

ScalingRun run_scaling_trace(const CPOperator& t, const ScalingConfig& config,
                             const TraceSink& sink) {
  const int n = t.n();
  ScalingRun run;
  run.mode = config.mode.to_string();
  if (n == 1) {
    run.verdict = ScalingVerdict::RankNonDecreasing;
    return run;
  }
  if (step_one_singular(t)) {
    run.verdict = ScalingVerdict::RankDecreasing;
    return run;
  }
  CPOperator op = t;
  if (config.mode.kind != NumericMode::Float64) op = t.integerize().first;
  OperatorMeta meta = op.meta();
  const Rational threshold =
      config.ds_threshold.value_or(Rational(1, 6 * static_cast<long>(n)));
  const std::uint64_t budget = iteration_bound(n, meta.m, meta.max_entry);
  EngineParams params = make_params(config, threshold, budget, &sink);
  params.stop_at_crossing = config.stop_at_crossing;
  if (meta.max_entry >= 1) {
    Rational floor_run = capacity_lower_bound(n, meta.m, meta.max_entry);
    if (meta.gamma != 1)
      floor_run *= pow_rational(Rational(meta.gamma), -2L * n);
    params.capacity_floor = floor_run;
    params.ln_floor = ln_positive_rational(floor_run);
    params.confirm_op = &op;
  }
  ScalingRun out = dispatch_engine(op, config.mode, params);
  out.mode = config.mode.to_string();
  return out;
}

}  // namespace opscale
