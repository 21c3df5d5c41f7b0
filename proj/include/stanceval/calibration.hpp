#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stanceval {

struct HumanJudgment {
  std::string id;
  std::optional<double> quality;  // [0,1], for weight calibration
  std::optional<bool> correct;    // for threshold calibration
};

// JSONL {"id","quality"?,"correct"?}
std::vector<HumanJudgment> load_judgments(const std::string& path);

enum class Correlation { spearman, pearson };
Correlation parse_correlation(std::string_view name);

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);
// Average ranks for ties, then Pearson on the ranks.
double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y);

struct ComponentScores {
  double bertscore = 0.0;
  double bleu = 0.0;
  double rouge_l = 0.0;
  double recall = 0.0;
};

struct GridSearchResult {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double correlation = 0.0;
};

// Exhaustive sweep of the weight simplex in multiples of `step`, maximizing
// the correlation between per-sample composite scores and human quality.
// Objective ties resolve toward larger alpha, then larger beta. Requires at
// least 10 paired observations and non-constant human scores.
GridSearchResult grid_search_weights(const std::vector<ComponentScores>& dev_scores,
                                     const std::vector<double>& human_quality,
                                     double step = 0.05,
                                     Correlation corr = Correlation::spearman);

enum class ThresholdSelection { f1, youden };
ThresholdSelection parse_selection(std::string_view name);

struct SweepPoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // thresholds descending
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  double chosen_threshold = 0.0;
  std::string criterion;  // "f1" | "youden"
};

// Sweep over all distinct observed values plus {0,1}; predicted positive
// means value >= threshold. AUC-ROC by the trapezoid rule over the step
// curve; the chosen threshold maximizes F1 (or Youden's J), larger threshold
// on ties. Both classes must be present.
SweepResult threshold_sweep(const std::vector<double>& values, const std::vector<bool>& labels,
                            ThresholdSelection selection = ThresholdSelection::f1);

// Fraction of samples where the gate verdict equals the human correctness
// label. Vectors are aligned; empty input is an error.
double human_agreement(const std::vector<bool>& gate_verdicts,
                       const std::vector<bool>& human_labels);

}  // namespace stanceval
