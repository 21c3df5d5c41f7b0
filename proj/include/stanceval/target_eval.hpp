#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stanceval/embedding.hpp"
#include "stanceval/types.hpp"

namespace stanceval {

enum class GateMode { pair, sample };

GateMode parse_gate_mode(std::string_view name);
std::string to_string(GateMode m);

struct EvalConfig {
  // Composite-score weights and correctness gate thresholds.
  double alpha = 0.6;
  double beta = 0.2;
  double gamma = 0.2;
  double tau_bertscore = 0.7;
  double tau_bleu = 0.2;
  double tau_rouge = 0.4;
  double tau_recall = 0.8;
  double tau_cscore = 0.3;

  Granularity granularity = Granularity::mixed;
  GateMode gate = GateMode::pair;
  // Matched pairs with combined similarity below the floor are dropped back
  // to unmatched. 0 keeps every assignment edge.
  double match_floor = 0.0;

  void validate() const;  // throws Error on bad weights/thresholds
};

struct MetricVector {
  double bertscore = 0.0;
  double bleu = 0.0;
  double rouge_l = 0.0;
};

// combined = alpha*BERTScore_F1 + beta*BLEU + gamma*ROUGE-L
double combined_similarity(const MetricVector& m, const EvalConfig& cfg);

MetricVector pair_similarity(const std::string& pred_target, const std::string& gold_target,
                             const EvalConfig& cfg, EmbeddingProvider& provider);

struct MatchedPair {
  int pred_index = -1;
  int gold_index = -1;
  MetricVector metrics;
  double combined = 0.0;
};

struct Alignment {
  std::vector<MatchedPair> matched;  // sorted by pred_index
  std::vector<int> unmatched_pred;
  std::vector<int> unmatched_gold;
};

// One-to-one alignment maximizing total combined similarity, deterministic
// tie-break toward low (pred, gold) indices.
Alignment align_targets(const std::vector<TargetStancePair>& pred,
                        const std::vector<TargetStancePair>& gold, const EvalConfig& cfg,
                        EmbeddingProvider& provider);

struct SampleScore {
  std::string id;
  int pred_count = 0;
  int gold_count = 0;
  std::vector<MatchedPair> pairs;
  std::vector<bool> pair_gate;        // per matched pair
  std::vector<bool> stance_eligible;  // per matched pair
  MetricVector sample;  // means over matched pairs, 0 when none matched
  double recall = 0.0;  // min(|pred|,|gold|) / |gold|
  double c_score = 0.0;
  bool sample_gate = false;  // recall & c-score context (pair mode) or all five (sample mode)
  bool missing_prediction = false;
};

// Sample-level means, Recall, composite score and gate verdicts from
// already-computed pair metrics. score_sample = align + this.
SampleScore score_from_pairs(std::string id, int pred_count, int gold_count,
                             std::vector<MatchedPair> matched, const EvalConfig& cfg);

// prediction may be null: the sample is scored as an empty prediction and
// flagged missing. Throws only on provider failure.
SampleScore score_sample(const Sample& sample, const Prediction* prediction,
                         const EvalConfig& cfg, EmbeddingProvider& provider);

// Corpus scoring in sample order. The parallel variant runs the per-sample
// loop under OpenMP; results are identical to the serial reference, which is
// kept for tests and the benchmark tool.
std::vector<SampleScore> score_corpus_serial(const std::vector<Sample>& samples,
                                             const std::vector<Prediction>& predictions,
                                             const EvalConfig& cfg, EmbeddingProvider& provider);
std::vector<SampleScore> score_corpus(const std::vector<Sample>& samples,
                                      const std::vector<Prediction>& predictions,
                                      const EvalConfig& cfg, EmbeddingProvider& provider,
                                      int threads = 0);  // 0 = OpenMP default

struct ReportRow {
  std::string label;
  std::int64_t samples = 0;
  MetricVector means;       // corpus means in [0,1]
  double recall = 0.0;
  double c_score = 0.0;
};

struct CorpusReport {
  ReportRow overall;
  std::vector<ReportRow> by_bucket;       // single/dual/triple/multi, present buckets only
  std::int64_t missing_predictions = 0;
};

// Corpus means of the five target-identification metrics with an optional
// target-count breakdown. Empty input is an error.
CorpusReport corpus_target_report(const std::vector<SampleScore>& scores);

// Explicit/implicit breakdown: gold pairs are filtered by their per-target
// flag and each subset is re-scored from scratch. Samples without any
// flagged target are skipped for that row.
std::vector<ReportRow> flag_breakdown_report(const std::vector<Sample>& samples,
                                             const std::vector<Prediction>& predictions,
                                             const EvalConfig& cfg, EmbeddingProvider& provider);

}  // namespace stanceval
