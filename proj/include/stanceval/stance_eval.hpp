#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "stanceval/target_eval.hpp"
#include "stanceval/types.hpp"

namespace stanceval {

// rows = gold, columns = predicted, fixed order support/against/neutral.
using Confusion = std::array<std::array<std::int64_t, 3>, 3>;

Confusion stance_confusion(const std::vector<std::pair<Stance, Stance>>& gold_pred);

enum class Averaging { macro, micro };

Averaging parse_averaging(std::string_view name);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-class precision/recall/F1 with the 0-convention for empty
// denominators. macro = unweighted mean of the three class values (macro F1
// is the mean of class F1s, not the harmonic mean of macro P and R);
// micro = pooled counts. All-zero confusion -> Error("NoEligiblePairs").
Prf stance_prf(const Confusion& confusion, Averaging avg = Averaging::macro);

std::array<Prf, 3> per_class_prf(const Confusion& confusion);

// (gold stance, predicted stance) for every stance-eligible matched pair.
// The gold stance of a pair is the stance of its aligned gold target.
std::vector<std::pair<Stance, Stance>> eligible_stance_pairs(
    const std::vector<Sample>& samples, const std::vector<Prediction>& predictions,
    const std::vector<SampleScore>& scores);

}  // namespace stanceval
