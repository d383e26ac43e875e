#include "opscale/ncrank.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "opscale/errors.hpp"

namespace opscale {

CPOperator pencil_operator(const LinearMatrixPencil& p) {
  LinearMatrixPencil q = affine_to_linear(p);
  int n = std::max(q.rows, q.cols);
  std::vector<QMat> kraus;
  kraus.reserve(q.coeffs.size());
  for (const auto& c : q.coeffs) {
    if (c.is_zero()) continue;
    if (q.rows == n && q.cols == n) {
      kraus.push_back(c);
    } else {
      QMat padded = QMat::zero(n, n);
      for (int i = 0; i < q.rows; ++i) {
        for (int j = 0; j < q.cols; ++j) padded(i, j) = c(i, j);
      }
      kraus.push_back(std::move(padded));
    }
  }
  if (kraus.empty()) kraus.push_back(QMat::zero(n, n));
  CPOperator t(std::move(kraus));
  if (t.m() > t.n() * t.n()) t = t.reduce_kraus_basis();
  return t;
}

FullnessResult fullness(const LinearMatrixPencil& p, const ScalingConfig& cfg) {
  p.validate();
  if (!p.is_square()) {
    throw DimensionError("fullness is defined for square pencils");
  }
  ScalingRun run = run_fullness_test(pencil_operator(p), cfg);
  return {run.verdict == ScalingVerdict::RankNonDecreasing, run.iterations};
}

namespace {

// True when the padded operator certifies a rank drop of at least c.
bool rank_drop_probe(const CPOperator& t, int c, const ScalingConfig& cfg,
                     SubVerdict& sv) {
  CPOperator padded = t.pad_bar(c);
  ScalingRun run = run_fullness_test(padded, cfg);
  sv.probe = "c=" + std::to_string(c);
  sv.full = run.verdict == ScalingVerdict::RankNonDecreasing;
  sv.iterations = run.iterations;
  return !sv.full;
}

}  // namespace

RankReport ncrank_quantum(const LinearMatrixPencil& p, const ScalingConfig& cfg,
                          int estimate_trials, std::uint64_t seed) {
  p.validate();
  RankReport report;
  report.method = "quantum-padding";
  report.trials = estimate_trials;
  report.commutative_rank_estimate =
      commutative_rank_estimate(p, estimate_trials, seed);

  CPOperator t = pencil_operator(p);
  int n = t.n();

  SubVerdict sv;
  if (!rank_drop_probe(t, 1, cfg, sv)) {
    report.subverdicts.push_back(sv);
    report.ncrank = n;
    return report;
  }
  report.subverdicts.push_back(sv);

  // Largest c with a certified rank drop; the probe is monotone, so binary
  // search between the known-true c=1 and n.
  int lo = 1, hi = n;
  while (lo < hi) {
    int mid = lo + (hi - lo + 1) / 2;
    SubVerdict probe;
    if (rank_drop_probe(t, mid, cfg, probe)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
    report.subverdicts.push_back(probe);
  }
  report.ncrank = n - lo;
  return report;
}

namespace {

// U * M * V with fresh variables u_a_i and v_j_b; entry (a, b) is
// sum_{i,j} u_a_i * m_ij * v_j_b over the not-identically-zero entries.
SymbolicMatrix compress_umv(const SymbolicMatrix& m, int r) {
  SymbolicMatrix out;
  out.rows = r;
  out.cols = r;
  out.entries.resize(static_cast<std::size_t>(r) * r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      FormulaPtr e;
      for (int i = 0; i < m.rows; ++i) {
        FormulaPtr u = Formula::var("u_" + std::to_string(a + 1) + "_" +
                                    std::to_string(i + 1));
        for (int j = 0; j < m.cols; ++j) {
          const FormulaPtr& mid = m.at(i, j);
          if (auto form = affine_form(mid); form && form->is_zero()) continue;
          FormulaPtr v = Formula::var("v_" + std::to_string(j + 1) + "_" +
                                      std::to_string(b + 1));
          FormulaPtr term = Formula::mul(Formula::mul(u, mid), v);
          e = e ? Formula::add(e, std::move(term)) : std::move(term);
        }
      }
      out.at(a, b) = e ? e : Formula::constant(Rational(0));
    }
  }
  return out;
}

FullnessResult probe_symbolic_full(const SymbolicMatrix& m,
                                   const ScalingConfig& cfg) {
  HigmanResult h = higman_linearize(m);
  return fullness(h.pencil, cfg);
}

}  // namespace

RankReport ncrank_classical(const SymbolicMatrix& m, const ScalingConfig& cfg,
                            int estimate_trials, std::uint64_t seed) {
  if (m.rows < 1 || m.cols < 1) {
    throw DimensionError("symbolic matrix must be nonempty");
  }
  if (!m.division_free()) {
    throw PreconditionError("nc-rank requires division-free entries");
  }
  RankReport report;
  report.method = "classical-borders";
  report.trials = estimate_trials;
  report.commutative_rank_estimate =
      commutative_rank_estimate(m, estimate_trials, seed);

  int top = std::min(m.rows, m.cols);
  int known_max = top;
  if (m.rows == m.cols) {
    // Direct top probe: a square matrix is compressed by generically
    // invertible U and V, so the compression step is unnecessary.
    FullnessResult f = probe_symbolic_full(m, cfg);
    SubVerdict sv;
    sv.probe = "r=" + std::to_string(top);
    sv.full = f.full;
    sv.iterations = f.iterations;
    report.subverdicts.push_back(sv);
    if (f.full) {
      report.ncrank = top;
      return report;
    }
    known_max = top - 1;
  }

  int rank = 0;
  for (int r = 1; r <= known_max; ++r) {
    FullnessResult f = probe_symbolic_full(compress_umv(m, r), cfg);
    SubVerdict sv;
    sv.probe = "r=" + std::to_string(r);
    sv.full = f.full;
    sv.iterations = f.iterations;
    report.subverdicts.push_back(sv);
    if (!f.full) break;
    rank = r;
  }
  report.ncrank = rank;
  return report;
}

int commutative_rank_estimate(const LinearMatrixPencil& p, int trials,
                              std::uint64_t seed) {
  p.validate();
  int n = std::max(p.rows, p.cols);
  long bound = 2L * n * n;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> dist(-bound, bound);
  int best = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<Rational> point;
    point.reserve(p.vars.size());
    for (std::size_t i = 0; i < p.vars.size(); ++i) {
      point.emplace_back(dist(rng));
    }
    best = std::max(best, rank(eval_pencil(p, point)));
  }
  return best;
}

int commutative_rank_estimate(const SymbolicMatrix& m, int trials,
                              std::uint64_t seed) {
  if (m.rows < 1 || m.cols < 1) {
    throw DimensionError("symbolic matrix must be nonempty");
  }
  std::vector<std::string> vars;
  {
    std::set<std::string> s;
    for (const auto& e : m.entries) {
      for (auto& v : collect_variables(e)) s.insert(v);
    }
    vars.assign(s.begin(), s.end());
  }
  int n = std::max(m.rows, m.cols);
  long bound = 2L * n * n;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> dist(-bound, bound);
  int best = 0;
  int done = 0;
  for (int attempt = 0; attempt < 10 * trials && done < trials; ++attempt) {
    std::map<std::string, QMat> subst;
    for (const auto& v : vars) {
      QMat x(1, 1);
      x(0, 0) = Rational(dist(rng));
      subst.emplace(v, std::move(x));
    }
    QMat eval(m.rows, m.cols);
    bool ok = true;
    for (int i = 0; i < m.rows && ok; ++i) {
      for (int j = 0; j < m.cols && ok; ++j) {
        auto val = eval_formula(m.at(i, j), subst, 1);
        if (!val) {
          ok = false;  // substitution outside some inverse's domain
        } else {
          eval(i, j) = (*val)(0, 0);
        }
      }
    }
    if (!ok) continue;
    best = std::max(best, rank(eval));
    ++done;
  }
  return best;
}

}  // namespace opscale
