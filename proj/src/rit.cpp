#include "opscale/rit.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "opscale/errors.hpp"
#include "opscale/ncrank.hpp"
#include "opscale/pencil.hpp"

namespace opscale {

RitResult rit_test(const FormulaPtr& f, const ScalingConfig& cfg) {
  if (!f) throw PreconditionError("cannot test a null formula");
  LinearMatrixPencil realization = formula_to_pencil(f);
  FullnessResult domain = fullness(realization, cfg);
  if (!domain.full) {
    throw EmptyDomainError(
        "no matrix substitution makes every inverse in the formula defined");
  }
  LinearMatrixPencil bordered = inverse_entry_border(realization);
  FullnessResult zero_probe = fullness(bordered, cfg);
  RitResult res;
  res.verdict = zero_probe.full ? RitVerdict::NonZero : RitVerdict::Zero;
  res.pencil_dim = bordered.rows;
  res.domain_iterations = domain.iterations;
  res.zero_iterations = zero_probe.iterations;
  return res;
}

std::optional<bool> rit_evaluation_probe(const FormulaPtr& f, int attempts,
                                         std::uint64_t seed) {
  if (!f) throw PreconditionError("cannot evaluate a null formula");
  int d = static_cast<int>(std::max<std::size_t>(2, f->size()));
  std::vector<std::string> vars = collect_variables(f);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> dist(-5, 5);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::map<std::string, QMat> subst;
    for (const auto& v : vars) {
      QMat x(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) x(i, j) = Rational(dist(rng));
      }
      subst.emplace(v, std::move(x));
    }
    auto val = eval_formula(f, subst, d);
    if (!val) continue;
    return val->is_zero();
  }
  return std::nullopt;
}

}  // namespace opscale
