#include "stanceval/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "stanceval/dataset.hpp"
#include "stanceval/error.hpp"

namespace stanceval {

std::vector<HumanJudgment> load_judgments(const std::string& path) {
  std::vector<HumanJudgment> out;
  for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& obj) {
    const std::string where = path + ":" + std::to_string(line_no);
    HumanJudgment j;
    if (!obj.contains("id") || !obj["id"].is_string())
      throw Error("MalformedLine", where + ": missing \"id\"");
    j.id = obj["id"].get<std::string>();
    if (obj.contains("quality")) {
      const double q = obj["quality"].get<double>();
      if (q < 0.0 || q > 1.0) throw Error("MalformedLine", where + ": quality outside [0,1]");
      j.quality = q;
    }
    if (obj.contains("correct")) j.correct = obj["correct"].get<bool>();
    out.push_back(std::move(j));
  });
  return out;
}

Correlation parse_correlation(std::string_view name) {
  if (name == "spearman") return Correlation::spearman;
  if (name == "pearson") return Correlation::pearson;
  throw Error("BadArgument", "unknown correlation: " + std::string(name));
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("BadArgument", "pearson: need >= 2 paired values");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

namespace {

// Average ranks for ties, 1-based.
std::vector<double> ranks_of(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size(), 0.0);
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson_correlation(ranks_of(x), ranks_of(y));
}

GridSearchResult grid_search_weights(const std::vector<ComponentScores>& dev_scores,
                                     const std::vector<double>& human_quality, double step,
                                     Correlation corr) {
  if (dev_scores.size() != human_quality.size())
    throw Error("BadArgument", "grid search: scores and judgments must align");
  if (dev_scores.size() < 10)
    throw Error("BadArgument", "grid search: need >= 10 paired observations");
  const int n = static_cast<int>(std::llround(1.0 / step));
  if (!(step > 0.0) || std::abs(n * step - 1.0) > 1e-9)
    throw Error("BadArgument", "grid search: step must divide 1");
  const bool constant_human =
      std::all_of(human_quality.begin(), human_quality.end(),
                  [&](double q) { return q == human_quality.front(); });
  if (constant_human)
    throw Error("DegenerateJudgments", "grid search: human scores are constant");

  struct Cell {
    int i, j;
    double objective;
  };
  std::vector<Cell> cells;
  for (int i = n; i >= 0; --i)
    for (int j = n - i; j >= 0; --j) cells.push_back({i, j, 0.0});

  const long n_cells = static_cast<long>(cells.size());
#pragma omp parallel for schedule(static)
  for (long c = 0; c < n_cells; ++c) {
    const double a = static_cast<double>(cells[static_cast<std::size_t>(c)].i) / n;
    const double b = static_cast<double>(cells[static_cast<std::size_t>(c)].j) / n;
    const double g = static_cast<double>(n - cells[static_cast<std::size_t>(c)].i -
                                         cells[static_cast<std::size_t>(c)].j) /
                     n;
    std::vector<double> composite(dev_scores.size());
    for (std::size_t s = 0; s < dev_scores.size(); ++s) {
      const auto& d = dev_scores[s];
      composite[s] = (a * d.bertscore + b * d.bleu + g * d.rouge_l) * d.recall;
    }
    double obj;
    try {
      obj = corr == Correlation::spearman ? spearman_correlation(composite, human_quality)
                                          : pearson_correlation(composite, human_quality);
    } catch (const Error&) {
      obj = std::numeric_limits<double>::quiet_NaN();
    }
    cells[static_cast<std::size_t>(c)].objective = obj;
  }

  // cells are ordered by alpha desc then beta desc, so the first strict
  // maximum realizes the tie-break toward larger alpha, then beta.
  const Cell* best = nullptr;
  for (const auto& c : cells) {
    if (std::isnan(c.objective)) continue;
    if (!best || c.objective > best->objective) best = &c;
  }
  if (!best) throw Error("DegenerateJudgments", "grid search: objective undefined everywhere");
  return {static_cast<double>(best->i) / n, static_cast<double>(best->j) / n,
          static_cast<double>(n - best->i - best->j) / n, best->objective};
}

ThresholdSelection parse_selection(std::string_view name) {
  if (name == "f1") return ThresholdSelection::f1;
  if (name == "youden") return ThresholdSelection::youden;
  throw Error("BadArgument", "unknown threshold selection: " + std::string(name));
}

SweepResult threshold_sweep(const std::vector<double>& values, const std::vector<bool>& labels,
                            ThresholdSelection selection) {
  if (values.size() != labels.size() || values.empty())
    throw Error("BadArgument", "threshold sweep: values and labels must align");
  std::int64_t pos = 0, neg = 0;
  for (bool l : labels) (l ? pos : neg) += 1;
  if (pos == 0 || neg == 0)
    throw Error("SingleClass", "threshold sweep: both classes must be present");

  std::set<double, std::greater<double>> thresholds(values.begin(), values.end());
  thresholds.insert(0.0);
  thresholds.insert(1.0);

  // Sort once, then accumulate TP/FP walking scores from high to low.
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  SweepResult result;
  result.criterion = selection == ThresholdSelection::f1 ? "f1" : "youden";
  std::int64_t tp = 0, fp = 0;
  std::size_t consumed = 0;
  for (double theta : thresholds) {
    while (consumed < order.size() && values[order[consumed]] >= theta) {
      (labels[order[consumed]] ? tp : fp) += 1;
      ++consumed;
    }
    SweepPoint pt;
    pt.threshold = theta;
    pt.tpr = static_cast<double>(tp) / static_cast<double>(pos);
    pt.fpr = static_cast<double>(fp) / static_cast<double>(neg);
    pt.recall = pt.tpr;
    pt.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 1.0;
    result.points.push_back(pt);
  }

  // ROC area from (0,0) to (1,1) by trapezoids over the swept points.
  double auc = 0.0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  for (const auto& pt : result.points) {
    auc += (pt.fpr - prev_fpr) * (pt.tpr + prev_tpr) / 2.0;
    prev_fpr = pt.fpr;
    prev_tpr = pt.tpr;
  }
  auc += (1.0 - prev_fpr) * (1.0 + prev_tpr) / 2.0;
  result.auc_roc = auc;

  double auc_pr = 0.0;
  double prev_rec = 0.0, prev_prec = 1.0;
  for (const auto& pt : result.points) {
    auc_pr += (pt.recall - prev_rec) * (pt.precision + prev_prec) / 2.0;
    prev_rec = pt.recall;
    prev_prec = pt.precision;
  }
  result.auc_pr = auc_pr;

  double best_score = -1.0;
  for (const auto& pt : result.points) {
    double score;
    if (selection == ThresholdSelection::f1) {
      score = (pt.precision + pt.recall) > 0.0
                  ? 2.0 * pt.precision * pt.recall / (pt.precision + pt.recall)
                  : 0.0;
    } else {
      score = pt.tpr - pt.fpr;
    }
    // strict > keeps the largest threshold among ties (points descend)
    if (score > best_score) {
      best_score = score;
      result.chosen_threshold = pt.threshold;
    }
  }
  return result;
}

double human_agreement(const std::vector<bool>& gate_verdicts,
                       const std::vector<bool>& human_labels) {
  if (gate_verdicts.size() != human_labels.size())
    throw Error("BadArgument", "human agreement: vectors must align");
  if (gate_verdicts.empty()) throw Error("EmptyInput", "human agreement: no overlap");
  std::size_t same = 0;
  for (std::size_t i = 0; i < gate_verdicts.size(); ++i)
    same += gate_verdicts[i] == human_labels[i];
  return static_cast<double>(same) / static_cast<double>(gate_verdicts.size());
}

}  // namespace stanceval
