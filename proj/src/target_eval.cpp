#include "stanceval/target_eval.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "stanceval/assignment.hpp"
#include "stanceval/error.hpp"
#include "stanceval/metrics.hpp"

namespace stanceval {

GateMode parse_gate_mode(std::string_view name) {
  if (name == "pair") return GateMode::pair;
  if (name == "sample") return GateMode::sample;
  throw Error("BadArgument", "unknown gate mode: " + std::string(name));
}

std::string to_string(GateMode m) { return m == GateMode::pair ? "pair" : "sample"; }

void EvalConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0)
    throw Error("BadConfig", "weights must be non-negative");
  if (std::abs(alpha + beta + gamma - 1.0) > 1e-9)
    throw Error("BadConfig", "weights must sum to 1");
  for (double t : {tau_bertscore, tau_bleu, tau_rouge, tau_recall, tau_cscore})
    if (t < 0.0 || t > 1.0) throw Error("BadConfig", "thresholds must lie in [0,1]");
  if (match_floor < 0.0 || match_floor > 1.0)
    throw Error("BadConfig", "match floor must lie in [0,1]");
}

double combined_similarity(const MetricVector& m, const EvalConfig& cfg) {
  return cfg.alpha * m.bertscore + cfg.beta * m.bleu + cfg.gamma * m.rouge_l;
}

MetricVector pair_similarity(const std::string& pred_target, const std::string& gold_target,
                             const EvalConfig& cfg, EmbeddingProvider& provider) {
  const TokenSeq cand = tokenize(pred_target, cfg.granularity);
  const TokenSeq ref = tokenize(gold_target, cfg.granularity);
  MetricVector m;
  m.bertscore = bert_score(cand, ref, provider).f1;
  m.bleu = bleu(cand, ref);
  m.rouge_l = rouge_l(cand, ref);
  return m;
}

Alignment align_targets(const std::vector<TargetStancePair>& pred,
                        const std::vector<TargetStancePair>& gold, const EvalConfig& cfg,
                        EmbeddingProvider& provider) {
  Alignment out;
  if (pred.empty() || gold.empty()) {
    for (int i = 0; i < static_cast<int>(pred.size()); ++i) out.unmatched_pred.push_back(i);
    for (int j = 0; j < static_cast<int>(gold.size()); ++j) out.unmatched_gold.push_back(j);
    return out;
  }

  std::vector<std::vector<MetricVector>> metrics(pred.size(),
                                                 std::vector<MetricVector>(gold.size()));
  std::vector<std::vector<double>> weights(pred.size(), std::vector<double>(gold.size()));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gold.size(); ++j) {
      metrics[i][j] = pair_similarity(pred[i].target, gold[j].target, cfg, provider);
      weights[i][j] = combined_similarity(metrics[i][j], cfg);
    }
  }

  const std::vector<int> assign = max_weight_assignment(weights);
  std::vector<bool> gold_used(gold.size(), false);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int j = assign[i];
    if (j >= 0 && weights[i][static_cast<std::size_t>(j)] >= cfg.match_floor) {
      out.matched.push_back({static_cast<int>(i), j, metrics[i][static_cast<std::size_t>(j)],
                             weights[i][static_cast<std::size_t>(j)]});
      gold_used[static_cast<std::size_t>(j)] = true;
    } else {
      out.unmatched_pred.push_back(static_cast<int>(i));
    }
  }
  for (std::size_t j = 0; j < gold.size(); ++j)
    if (!gold_used[j]) out.unmatched_gold.push_back(static_cast<int>(j));
  return out;
}

namespace {

std::vector<TargetStancePair> dedupe_pairs(const std::vector<TargetStancePair>& pairs) {
  std::vector<TargetStancePair> out;
  std::unordered_set<std::string> seen;
  for (const auto& p : pairs)
    if (seen.insert(p.target).second) out.push_back(p);
  return out;
}

}  // namespace

SampleScore score_from_pairs(std::string id, int pred_count, int gold_count,
                             std::vector<MatchedPair> matched, const EvalConfig& cfg) {
  SampleScore s;
  s.id = std::move(id);
  s.pred_count = pred_count;
  s.gold_count = gold_count;
  s.pairs = std::move(matched);

  if (!s.pairs.empty()) {
    for (const auto& mp : s.pairs) {
      s.sample.bertscore += mp.metrics.bertscore;
      s.sample.bleu += mp.metrics.bleu;
      s.sample.rouge_l += mp.metrics.rouge_l;
    }
    const double n = static_cast<double>(s.pairs.size());
    s.sample.bertscore /= n;
    s.sample.bleu /= n;
    s.sample.rouge_l /= n;
  }

  s.recall = s.gold_count > 0
                 ? static_cast<double>(std::min(s.pred_count, s.gold_count)) /
                       static_cast<double>(s.gold_count)
                 : 0.0;
  s.c_score = combined_similarity(s.sample, cfg) * s.recall;

  const bool recall_ok = s.recall >= cfg.tau_recall;
  const bool cscore_ok = s.c_score >= cfg.tau_cscore;
  if (cfg.gate == GateMode::pair) {
    s.sample_gate = recall_ok && cscore_ok;
    for (const auto& mp : s.pairs) {
      const bool pg = mp.metrics.bertscore >= cfg.tau_bertscore &&
                      mp.metrics.bleu >= cfg.tau_bleu && mp.metrics.rouge_l >= cfg.tau_rouge;
      s.pair_gate.push_back(pg);
      s.stance_eligible.push_back(pg && s.sample_gate);
    }
  } else {
    const bool sample_pass = s.sample.bertscore >= cfg.tau_bertscore &&
                             s.sample.bleu >= cfg.tau_bleu &&
                             s.sample.rouge_l >= cfg.tau_rouge && recall_ok && cscore_ok;
    s.sample_gate = sample_pass;
    s.pair_gate.assign(s.pairs.size(), sample_pass);
    s.stance_eligible.assign(s.pairs.size(), sample_pass);
  }
  return s;
}

SampleScore score_sample(const Sample& sample, const Prediction* prediction,
                         const EvalConfig& cfg, EmbeddingProvider& provider) {
  const std::vector<TargetStancePair> pred =
      prediction ? dedupe_pairs(prediction->pairs) : std::vector<TargetStancePair>{};
  const Alignment alignment = align_targets(pred, sample.pairs, cfg, provider);
  SampleScore s = score_from_pairs(sample.id, static_cast<int>(pred.size()),
                                   static_cast<int>(sample.pairs.size()), alignment.matched, cfg);
  s.missing_prediction = prediction == nullptr;
  return s;
}

namespace {

std::unordered_map<std::string, const Prediction*> index_predictions(
    const std::vector<Prediction>& predictions) {
  std::unordered_map<std::string, const Prediction*> by_id;
  by_id.reserve(predictions.size());
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second)
      throw Error("DuplicateId", "duplicate prediction id: " + p.id);
  }
  return by_id;
}

}  // namespace

namespace {

// Provider failures get the sample id attached so retries can be targeted.
SampleScore score_with_context(const Sample& sample, const Prediction* prediction,
                               const EvalConfig& cfg, EmbeddingProvider& provider) {
  try {
    return score_sample(sample, prediction, cfg, provider);
  } catch (const Error& e) {
    throw Error(e.code(), "sample " + sample.id + ": " + e.what());
  }
}

}  // namespace

std::vector<SampleScore> score_corpus_serial(const std::vector<Sample>& samples,
                                             const std::vector<Prediction>& predictions,
                                             const EvalConfig& cfg,
                                             EmbeddingProvider& provider) {
  cfg.validate();
  const auto by_id = index_predictions(predictions);
  std::vector<SampleScore> scores(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto it = by_id.find(samples[i].id);
    scores[i] =
        score_with_context(samples[i], it == by_id.end() ? nullptr : it->second, cfg, provider);
  }
  return scores;
}

std::vector<SampleScore> score_corpus(const std::vector<Sample>& samples,
                                      const std::vector<Prediction>& predictions,
                                      const EvalConfig& cfg, EmbeddingProvider& provider,
                                      int threads) {
  cfg.validate();
  const auto by_id = index_predictions(predictions);
  std::vector<SampleScore> scores(samples.size());
  std::exception_ptr failure;
  const long n = static_cast<long>(samples.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads > 0 ? threads : omp_get_max_threads())
  for (long i = 0; i < n; ++i) {
    try {
      const auto it = by_id.find(samples[static_cast<std::size_t>(i)].id);
      scores[static_cast<std::size_t>(i)] =
          score_with_context(samples[static_cast<std::size_t>(i)],
                             it == by_id.end() ? nullptr : it->second, cfg, provider);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return scores;
}

CorpusReport corpus_target_report(const std::vector<SampleScore>& scores) {
  if (scores.empty()) throw Error("EmptyInput", "no samples to report on");
  CorpusReport report;
  std::array<ReportRow, 4> buckets;
  for (int b = 0; b < 4; ++b) buckets[static_cast<std::size_t>(b)].label = kBucketNames[static_cast<std::size_t>(b)];
  report.overall.label = "all";

  auto add = [](ReportRow& row, const SampleScore& s) {
    row.samples += 1;
    row.means.bertscore += s.sample.bertscore;
    row.means.bleu += s.sample.bleu;
    row.means.rouge_l += s.sample.rouge_l;
    row.recall += s.recall;
    row.c_score += s.c_score;
  };
  auto finish = [](ReportRow& row) {
    if (row.samples == 0) return;
    const double n = static_cast<double>(row.samples);
    row.means.bertscore /= n;
    row.means.bleu /= n;
    row.means.rouge_l /= n;
    row.recall /= n;
    row.c_score /= n;
  };

  for (const auto& s : scores) {
    add(report.overall, s);
    add(buckets[static_cast<std::size_t>(target_bucket(static_cast<std::size_t>(s.gold_count)))], s);
    report.missing_predictions += s.missing_prediction ? 1 : 0;
  }
  finish(report.overall);
  for (auto& b : buckets) {
    finish(b);
    if (b.samples > 0) report.by_bucket.push_back(b);
  }
  return report;
}

std::vector<ReportRow> flag_breakdown_report(const std::vector<Sample>& samples,
                                             const std::vector<Prediction>& predictions,
                                             const EvalConfig& cfg,
                                             EmbeddingProvider& provider) {
  std::vector<ReportRow> rows;
  for (const bool want_explicit : {true, false}) {
    std::vector<Sample> filtered;
    for (const auto& sample : samples) {
      Sample copy;
      copy.id = sample.id;
      copy.text = sample.text;
      for (std::size_t k = 0; k < sample.pairs.size(); ++k) {
        const auto flag = sample.explicit_flag(k);
        if (flag.has_value() && *flag == want_explicit) copy.pairs.push_back(sample.pairs[k]);
      }
      if (!copy.pairs.empty()) filtered.push_back(std::move(copy));
    }
    ReportRow row;
    row.label = want_explicit ? "explicit" : "implicit";
    if (!filtered.empty()) {
      const auto scores = score_corpus(filtered, predictions, cfg, provider);
      const auto report = corpus_target_report(scores);
      row = report.overall;
      row.label = want_explicit ? "explicit" : "implicit";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace stanceval
