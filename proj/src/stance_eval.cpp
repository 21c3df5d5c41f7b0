#include "stanceval/stance_eval.hpp"

#include <unordered_map>

#include "stanceval/error.hpp"

namespace stanceval {

Confusion stance_confusion(const std::vector<std::pair<Stance, Stance>>& gold_pred) {
  Confusion m = {};
  for (const auto& [gold, pred] : gold_pred)
    ++m[static_cast<std::size_t>(gold)][static_cast<std::size_t>(pred)];
  return m;
}

Averaging parse_averaging(std::string_view name) {
  if (name == "macro") return Averaging::macro;
  if (name == "micro") return Averaging::micro;
  throw Error("BadArgument", "unknown averaging mode: " + std::string(name));
}

std::array<Prf, 3> per_class_prf(const Confusion& m) {
  std::array<Prf, 3> out;
  for (std::size_t c = 0; c < 3; ++c) {
    std::int64_t tp = m[c][c], col = 0, row = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      col += m[k][c];
      row += m[c][k];
    }
    const double p = col > 0 ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    const double r = row > 0 ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    const double f1 = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    out[c] = {p, r, f1};
  }
  return out;
}

Prf stance_prf(const Confusion& m, Averaging avg) {
  std::int64_t total = 0, diag = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      total += m[i][j];
      if (i == j) diag += m[i][j];
    }
  if (total == 0) throw Error("NoEligiblePairs", "stance confusion matrix is empty");

  if (avg == Averaging::micro) {
    // single-label multiclass: micro P = R = F1 = accuracy
    const double acc = static_cast<double>(diag) / static_cast<double>(total);
    return {acc, acc, acc};
  }
  const auto classes = per_class_prf(m);
  Prf out;
  for (const auto& c : classes) {
    out.precision += c.precision / 3.0;
    out.recall += c.recall / 3.0;
    out.f1 += c.f1 / 3.0;
  }
  return out;
}

std::vector<std::pair<Stance, Stance>> eligible_stance_pairs(
    const std::vector<Sample>& samples, const std::vector<Prediction>& predictions,
    const std::vector<SampleScore>& scores) {
  std::unordered_map<std::string, const Sample*> sample_by_id;
  for (const auto& s : samples) sample_by_id[s.id] = &s;
  std::unordered_map<std::string, std::vector<TargetStancePair>> pred_by_id;
  for (const auto& p : predictions) {
    // mirror the dedupe applied during scoring so pair indices line up
    std::vector<TargetStancePair> deduped;
    std::unordered_map<std::string, bool> seen;
    for (const auto& pair : p.pairs)
      if (!seen[pair.target]) {
        seen[pair.target] = true;
        deduped.push_back(pair);
      }
    pred_by_id[p.id] = std::move(deduped);
  }

  std::vector<std::pair<Stance, Stance>> out;
  for (const auto& score : scores) {
    const auto sit = sample_by_id.find(score.id);
    const auto pit = pred_by_id.find(score.id);
    if (sit == sample_by_id.end() || pit == pred_by_id.end()) continue;
    for (std::size_t k = 0; k < score.pairs.size(); ++k) {
      if (!score.stance_eligible[k]) continue;
      const auto& mp = score.pairs[k];
      out.emplace_back(sit->second->pairs[static_cast<std::size_t>(mp.gold_index)].stance,
                       pit->second[static_cast<std::size_t>(mp.pred_index)].stance);
    }
  }
  return out;
}

}  // namespace stanceval
