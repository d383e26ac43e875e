#pragma once

#include <cstdint>
#include <optional>

#include "opscale/formula.hpp"
#include "opscale/scaling.hpp"

namespace opscale {

enum class RitVerdict { Zero, NonZero };

struct RitResult {
  RitVerdict verdict = RitVerdict::Zero;
  int pencil_dim = 0;  // dimension of the bordered pencil that was decided
  std::uint64_t domain_iterations = 0;
  std::uint64_t zero_iterations = 0;
};

// Decides whether the formula vanishes identically wherever it is defined,
// i.e. whether it is zero as an element of the free skew field. Realizes the
// formula as a pencil, requires that pencil to be full (otherwise no matrix
// substitution of any dimension makes every inverse defined and
// EmptyDomainError is thrown), then tests fullness of the inverse-entry
// border: bordered-full means the value is invertible, hence nonzero.
RitResult rit_test(const FormulaPtr& f, const ScalingConfig& cfg);

// Samples one exact rational matrix substitution of dimension max(2, size(f))
// with small integer entries, resampling while the draw falls outside the
// domain; returns whether the formula evaluated to the zero matrix, or
// nullopt if every attempt missed the domain.
std::optional<bool> rit_evaluation_probe(const FormulaPtr& f, int attempts,
                                         std::uint64_t seed);

}  // namespace opscale
