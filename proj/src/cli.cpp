#include "opscale/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "opscale/errors.hpp"
#include "opscale/formula.hpp"
#include "opscale/json_io.hpp"
#include "opscale/matrix_scaling.hpp"
#include "opscale/ncrank.hpp"
#include "opscale/oracles.hpp"
#include "opscale/pencil.hpp"
#include "opscale/rit.hpp"
#include "opscale/scaling.hpp"

namespace opscale {

std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

struct CommonFlags {
  std::string mode_text;
  bool json = false;
  bool verify = false;
  std::uint64_t seed = 20260823;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_document(const std::string& path, const std::string& bytes) {
  try {
    return Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    throw ParseError("malformed JSON in " + path + ": " + e.what(),
                     static_cast<std::size_t>(e.byte));
  }
}

NumericMode pick_mode(const CommonFlags& flags, NumericMode fallback) {
  if (flags.mode_text.empty()) return fallback;
  return NumericMode::parse(flags.mode_text);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

Json base_report(const std::string& command, const std::string& digest,
                 const NumericMode& mode, const CommonFlags& flags) {
  Json rep;
  rep["command"] = command;
  rep["input_digest"] = digest;
  rep["mode"] = mode.to_string();
  rep["seed"] = flags.seed;
  return rep;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void emit(const CommonFlags& flags, const Json& rep,
          const std::vector<std::string>& lines, std::ostream& out) {
  if (flags.json) {
    out << rep.dump(2) << "\n";
  } else {
    for (const auto& l : lines) out << l << "\n";
  }
}

LinearMatrixPencil operator_pencil(const CPOperator& t) {
  LinearMatrixPencil p;
  p.rows = p.cols = t.n();
  for (int i = 0; i < t.m(); ++i) {
    p.vars.push_back("x" + std::to_string(i + 1));
    p.coeffs.push_back(t.kraus()[i]);
  }
  return p;
}

int run_singular(const std::string& path, const CommonFlags& flags,
                 std::ostream& out) {
  std::string bytes = read_file(path);
  CPOperator t = operator_from_json(parse_document(path, bytes));
  ScalingConfig cfg;
  cfg.mode = pick_mode(flags, NumericMode::capped(256));
  Stopwatch watch;
  ScalingRun run = run_fullness_test(t, cfg);
  bool full = run.verdict == ScalingVerdict::RankNonDecreasing;

  Json rep = base_report("singular", content_digest(bytes), cfg.mode, flags);
  rep["full"] = full;
  rep["verdict"] = full ? "rank-non-decreasing" : "rank-decreasing";
  rep["iterations"] = run.iterations;
  rep["first_hit"] = run.first_hit ? Json(*run.first_hit) : Json(nullptr);
  std::vector<std::string> lines;
  lines.push_back(full ? "FULL (rank non-decreasing)"
                       : "RANK-DECREASING (singular)");
  if (flags.verify) {
    bool nonsingular =
        oracle::blowup_nonsingular(operator_pencil(t), 7, flags.seed);
    Json o;
    o["name"] = "blow-up-determinant";
    o["nonsingular"] = nonsingular;
    o["agrees"] = nonsingular == full;
    rep["oracle"] = std::move(o);
    lines.push_back(std::string("VERIFY blow-up determinant: ") +
                    (nonsingular == full ? "agrees" : "DISAGREES"));
  }
  rep["wall_time_ms"] = watch.ms();
  emit(flags, rep, lines, out);
  return full ? 0 : 1;
}

int run_ncrank(const std::string& path, const std::string& method,
               const CommonFlags& flags, std::ostream& out) {
  std::string bytes = read_file(path);
  Json doc = parse_document(path, bytes);
  bool is_pencil = doc.contains("coeffs");
  ScalingConfig cfg;
  cfg.mode = pick_mode(flags, NumericMode::capped(256));

  auto quantum_on_symbolic = [&](const SymbolicMatrix& m) {
    HigmanResult h = higman_linearize(m);
    RankReport r = ncrank_quantum(h.pencil, cfg, 7, flags.seed);
    r.ncrank -= h.peels;  // the linearization raises nc-rank by exactly k
    r.commutative_rank_estimate = commutative_rank_estimate(m, 7, flags.seed);
    return r;
  };

  auto compute = [&](const std::string& meth) {
    if (is_pencil) {
      LinearMatrixPencil p = pencil_from_json(doc);
      if (meth == "classical") {
        return ncrank_classical(symbolic_from_pencil(p), cfg, 7, flags.seed);
      }
      return ncrank_quantum(p, cfg, 7, flags.seed);
    }
    SymbolicMatrix m = symbolic_from_json(doc);
    if (meth == "quantum") return quantum_on_symbolic(m);
    return ncrank_classical(m, cfg, 7, flags.seed);
  };

  std::string chosen = method;
  if (chosen == "auto") chosen = is_pencil ? "quantum" : "classical";

  Stopwatch watch;
  RankReport report = compute(chosen);
  Json rep = base_report("ncrank", content_digest(bytes), cfg.mode, flags);
  rep.update(rank_report_to_json(report));
  std::vector<std::string> lines;
  lines.push_back("ncrank = " + std::to_string(report.ncrank) + " (" +
                  report.method + "); commutative rank estimate " +
                  std::to_string(report.commutative_rank_estimate));
  if (flags.verify) {
    std::string other = chosen == "quantum" ? "classical" : "quantum";
    RankReport cross = compute(other);
    Json o;
    o["name"] = "cross-method";
    o["method"] = cross.method;
    o["ncrank"] = cross.ncrank;
    o["agrees"] = cross.ncrank == report.ncrank;
    rep["oracle"] = std::move(o);
    lines.push_back(std::string("VERIFY cross-method (") + cross.method +
                    "): " +
                    (cross.ncrank == report.ncrank ? "agrees" : "DISAGREES"));
  }
  rep["wall_time_ms"] = watch.ms();
  emit(flags, rep, lines, out);
  return 0;
}

int run_capacity(const std::string& path, double eps, bool certified,
                 const CommonFlags& flags, std::ostream& out) {
  std::string bytes = read_file(path);
  CPOperator t = operator_from_json(parse_document(path, bytes));
  ScalingConfig cfg;
  cfg.mode = certified ? NumericMode::certified()
                       : pick_mode(flags, NumericMode::float64());
  Stopwatch watch;
  CapacityResult res = approx_capacity(t, eps, cfg);
  bool crossed = res.run.first_hit.has_value() || res.run.iterations == 0;

  Json rep = base_report("capacity", content_digest(bytes), cfg.mode, flags);
  rep["eps"] = eps;
  rep["value"] = res.value;
  rep["value_string"] = res.has_exact ? decimal_string(res.value_exact, 18)
                                      : format_double(res.value);
  rep["crossed"] = crossed;
  rep["iterations"] = res.run.iterations;
  if (res.bracket) {
    Json b;
    b["lower"] = decimal_string(res.bracket->lower, 18);
    b["upper"] = decimal_string(res.bracket->upper, 18);
    b["fixed_point_eps"] = decimal_string(res.bracket->fixed_point_eps, 18);
    rep["bracket"] = std::move(b);
  } else {
    rep["bracket"] = nullptr;
  }
  std::vector<std::string> lines;
  lines.push_back("capacity = " + rep["value_string"].get<std::string>() +
                  " (target accuracy " + format_double(eps) + ")");
  if (res.bracket) {
    lines.push_back("certified bracket [" +
                    rep["bracket"]["lower"].get<std::string>() + ", " +
                    rep["bracket"]["upper"].get<std::string>() + "]");
  }
  if (flags.verify && t.n() <= 4) {
    double reference = oracle::brute_force_capacity(t, 32, flags.seed);
    double rel = std::abs(res.value - reference) /
                 std::max(std::abs(reference), 1e-12);
    bool agrees = rel <= 0.15 ||
                  (std::abs(reference) < 1e-9 && std::abs(res.value) < 1e-9);
    Json o;
    o["name"] = "direct-minimization";
    o["value"] = reference;
    o["relative_difference"] = rel;
    o["agrees"] = agrees;
    rep["oracle"] = std::move(o);
    lines.push_back(std::string("VERIFY direct minimization: ") +
                    (agrees ? "agrees" : "DISAGREES") + " (reference " +
                    format_double(reference) + ")");
  }
  rep["wall_time_ms"] = watch.ms();
  emit(flags, rep, lines, out);
  return res.value > 0.0 ? 0 : 1;
}

int run_scale(const std::string& path, std::uint64_t iters, bool has_iters,
              const std::string& trace_path, const CommonFlags& flags,
              std::ostream& out) {
  std::string bytes = read_file(path);
  CPOperator t = operator_from_json(parse_document(path, bytes));
  ScalingConfig cfg;
  cfg.mode = pick_mode(flags, NumericMode::float64());
  cfg.stop_at_crossing = false;
  if (has_iters) cfg.max_iterations = iters;
  Stopwatch watch;
  ScalingRun run;
  if (trace_path.empty()) {
    run = run_fullness_test(t, cfg);
  } else {
    std::vector<TraceRecord> records;
    run = run_scaling_trace(
        t, cfg, [&records](const TraceRecord& r) { records.push_back(r); });
    std::ofstream trace(trace_path);
    if (!trace) throw ParseError("cannot write " + trace_path, 0);
    bool exact = run.eps_trace_exact.size() == records.size();
    for (std::size_t i = 0; i < records.size(); ++i) {
      Json line;
      line["j"] = records[i].j;
      line["eps_j"] = exact ? decimal_string(run.eps_trace_exact[i], 18)
                            : format_double(records[i].eps);
      line["log_det_accumulator"] = records[i].log_det_accumulator;
      trace << line.dump() << "\n";
    }
  }

  bool full = run.verdict == ScalingVerdict::RankNonDecreasing;
  double min_eps = 0.0;
  if (!run.eps_trace.empty()) {
    min_eps = *std::min_element(run.eps_trace.begin(), run.eps_trace.end());
  }
  Json rep = base_report("scale", content_digest(bytes), cfg.mode, flags);
  rep["iterations"] = run.iterations;
  rep["verdict"] = full ? "rank-non-decreasing" : "rank-decreasing";
  rep["first_hit"] = run.first_hit ? Json(*run.first_hit) : Json(nullptr);
  rep["min_eps"] = min_eps;
  rep["trace_file"] = trace_path.empty() ? Json(nullptr) : Json(trace_path);
  std::vector<std::string> lines;
  lines.push_back("ran " + std::to_string(run.iterations) +
                  " iterations; min eps " + format_double(min_eps));
  lines.push_back(full ? "threshold crossed (rank non-decreasing)"
                       : "no crossing within budget (rank decreasing)");
  rep["wall_time_ms"] = watch.ms();
  emit(flags, rep, lines, out);
  return full ? 0 : 1;
}

int run_matscale(const std::string& path, const CommonFlags& flags,
                 std::ostream& out) {
  std::string bytes = read_file(path);
  NonnegMatrix a = nonneg_matrix_from_json(parse_document(path, bytes));
  Stopwatch watch;
  bool positive = permanent_positive(a);

  Json rep = base_report("matscale", content_digest(bytes),
                         NumericMode::certified(), flags);
  rep["mode"] = "exact";  // the classical test is always exact
  rep["n"] = a.n();
  rep["permanent_positive"] = positive;
  std::vector<std::string> lines;
  lines.push_back(positive ? "PERMANENT POSITIVE" : "PERMANENT ZERO");
  if (flags.verify && a.n() <= 8) {
    Rational per = oracle::brute_force_permanent(a.entries);
    bool agrees = (per > 0) == positive;
    Json o;
    o["name"] = "inclusion-exclusion-permanent";
    o["permanent"] = to_string(per);
    o["agrees"] = agrees;
    rep["oracle"] = std::move(o);
    lines.push_back(std::string("VERIFY permanent = ") + to_string(per) +
                    ": " + (agrees ? "agrees" : "DISAGREES"));
  }
  rep["wall_time_ms"] = watch.ms();
  emit(flags, rep, lines, out);
  return positive ? 0 : 1;
}

int run_rit(const std::string& formula_text, const CommonFlags& flags,
            std::ostream& out) {
  FormulaPtr f = parse_formula(formula_text);
  ScalingConfig cfg;
  cfg.mode = pick_mode(flags, NumericMode::capped(256));
  Json rep = base_report("rit", content_digest(formula_text), cfg.mode, flags);
  rep["formula"] = print_formula(f);
  rep["size"] = f->size();
  Stopwatch watch;
  RitResult res;
  try {
    res = rit_test(f, cfg);
  } catch (const EmptyDomainError& e) {
    rep["verdict"] = "empty-domain";
    rep["wall_time_ms"] = watch.ms();
    emit(flags, rep, {std::string("EMPTY DOMAIN: ") + e.what()}, out);
    return 2;
  }
  bool zero = res.verdict == RitVerdict::Zero;
  rep["verdict"] = zero ? "zero" : "nonzero";
  rep["pencil_dim"] = res.pencil_dim;
  rep["domain_iterations"] = res.domain_iterations;
  rep["zero_iterations"] = res.zero_iterations;
  std::vector<std::string> lines;
  lines.push_back(zero ? "ZERO" : "NONZERO");
  if (flags.verify) {
    auto probe = rit_evaluation_probe(f, 20, flags.seed);
    Json o;
    o["name"] = "matrix-evaluation";
    if (probe) {
      o["evaluated_zero"] = *probe;
      o["agrees"] = *probe == zero;
      lines.push_back(std::string("VERIFY matrix evaluation: ") +
                      (*probe == zero ? "agrees" : "DISAGREES"));
    } else {
      o["evaluated_zero"] = nullptr;
      o["agrees"] = nullptr;
      lines.push_back("VERIFY matrix evaluation: no domain point found");
    }
    rep["oracle"] = std::move(o);
  }
  rep["wall_time_ms"] = watch.ms();
  emit(flags, rep, lines, out);
  return zero ? 0 : 1;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  CLI::App app{"operator scaling and non-commutative rank toolkit", "opscale"};
  app.require_subcommand(0, 1);
  app.fallthrough();  // global flags may appear after the subcommand

  CommonFlags flags;
  app.add_option("--mode", flags.mode_text,
                 "numeric mode: exact | exact-capped:<bits> | float");
  app.add_flag("--json", flags.json, "emit a JSON report");
  app.add_flag("--verify", flags.verify,
               "cross-check the result against an independent oracle");
  app.add_option("--seed", flags.seed, "seed for randomized oracles");

  std::string input;
  auto* sing = app.add_subcommand(
      "singular", "decide fullness of the operator's coefficient pencil");
  sing->add_option("input", input, "operator JSON file")->required();

  std::string method = "auto";
  auto* ncr = app.add_subcommand("ncrank", "non-commutative rank");
  ncr->add_option("input", input, "pencil or symbolic-matrix JSON file")
      ->required();
  ncr->add_option("--method", method, "classical | quantum | auto")
      ->check(CLI::IsMember({"classical", "quantum", "auto"}));

  double eps = 0.1;
  bool certified = false;
  auto* cap = app.add_subcommand("capacity", "approximate operator capacity");
  cap->add_option("input", input, "operator JSON file")->required();
  cap->add_option("--eps", eps, "relative accuracy target (0, 1)");
  cap->add_flag("--certified", certified,
                "exact un-truncated run (demonstration scale)");

  std::uint64_t iters = 0;
  std::string trace_path;
  auto* scl = app.add_subcommand("scale", "run the scaling iteration");
  scl->add_option("input", input, "operator JSON file")->required();
  auto* iters_opt = scl->add_option("--iters", iters, "iteration count");
  scl->add_option("--trace", trace_path, "JSONL trace output path");

  auto* mat = app.add_subcommand("matscale", "permanent positivity test");
  mat->add_option("input", input, "nonnegative matrix JSON file")->required();

  std::string formula_text;
  auto* rit = app.add_subcommand("rit", "rational identity test");
  rit->add_option("--formula", formula_text, "formula text")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sing->parsed()) return run_singular(input, flags, out);
    if (ncr->parsed()) return run_ncrank(input, method, flags, out);
    if (cap->parsed()) return run_capacity(input, eps, certified, flags, out);
    if (scl->parsed()) {
      return run_scale(input, iters, iters_opt->count() > 0, trace_path,
                       flags, out);
    }
    if (mat->parsed()) return run_matscale(input, flags, out);
    if (rit->parsed()) return run_rit(formula_text, flags, out);
    err << app.help();
    return 2;
  } catch (const PrecisionExhausted& e) {
    err << "precision exhausted: " << e.what() << "\n";
    return 3;
  } catch (const EmptyDomainError& e) {
    err << "empty domain: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace opscale
