// Acceptance suite: one criterion per function, one PASS/FAIL/SKIP line each.
// Exit code is nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stanceval/agreement.hpp"
#include "stanceval/annotation.hpp"
#include "stanceval/assignment.hpp"
#include "stanceval/calibration.hpp"
#include "stanceval/dataset.hpp"
#include "stanceval/embedding.hpp"
#include "stanceval/error.hpp"
#include "stanceval/metrics.hpp"
#include "stanceval/rng.hpp"
#include "stanceval/sampling.hpp"
#include "stanceval/stance_eval.hpp"
#include "stanceval/target_eval.hpp"
#include "temp_dir.hpp"

using namespace stanceval;

namespace {

struct Failure {
  std::string message;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Failure{message};
}

struct Skip {
  std::string reason;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::string> random_tokens(SplitMix64& rng, std::size_t max_len, std::size_t vocab) {
  const std::size_t len = rng.next_below(max_len + 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < len; ++i) out.push_back("w" + std::to_string(rng.next_below(vocab)));
  return out;
}

TokenSeq seq(std::vector<std::string> toks) {
  TokenSeq s;
  s.tokens = std::move(toks);
  return s;
}

// --- criterion 1: metric oracles -------------------------------------------

void criterion_metric_oracles() {
  const auto start = std::chrono::steady_clock::now();
  SplitMix64 rng(1001);

  // rouge_l vs exhaustive LCS, 1000 random pairs, lengths <= 12, exact
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_tokens(rng, 12, 5);
    const auto b = random_tokens(rng, 12, 5);
    const std::size_t lcs = oracles::lcs_exhaustive(a, b);
    double want = 0.0;
    if (lcs > 0 && !a.empty() && !b.empty()) {
      const double p = static_cast<double>(lcs) / static_cast<double>(a.size());
      const double r = static_cast<double>(lcs) / static_cast<double>(b.size());
      want = 2.0 * p * r / (p + r);
    }
    require(rouge_l(seq(a), seq(b)) == want, "rouge_l deviates from the LCS oracle");
  }

  // bleu vs brute-force n-gram oracle within 1e-12
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_tokens(rng, 12, 5);
    const auto b = random_tokens(rng, 12, 5);
    const double got = bleu(seq(a), seq(b));
    const double want = oracles::bleu_bruteforce(a, b);
    require(std::abs(got - want) <= 1e-12, "bleu deviates from the brute-force oracle");
  }

  // one-hot bert_score vs set-overlap oracle on unique-token pairs
  OneHotEmbedder embedder;
  std::vector<std::string> vocab;
  {
    std::set<std::size_t> axes;
    for (std::size_t k = 0; vocab.size() < 64; ++k) {
      std::string tok = "tok" + std::to_string(k);
      if (axes.insert(embedder.axis(tok)).second) vocab.push_back(std::move(tok));
    }
  }
  for (int trial = 0; trial < 1000; ++trial) {
    auto pick = [&](std::size_t n) {
      std::vector<std::string> pool = vocab;
      std::vector<std::string> out;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.next_below(pool.size() - i);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
      }
      return out;
    };
    const auto cand = pick(1 + rng.next_below(12));
    const auto ref = pick(1 + rng.next_below(12));
    const auto got = bert_score(seq(cand), seq(ref), embedder);
    const auto want = oracles::onehot_bert_set_oracle(cand, ref);
    require(std::abs(got.precision - want.precision) <= 1e-12 &&
                std::abs(got.recall - want.recall) <= 1e-12 &&
                std::abs(got.f1 - want.f1) <= 1e-12,
            "one-hot bert_score deviates from the set-overlap oracle");
  }

  require(seconds_since(start) < 10.0, "metric oracle runtime exceeded 10 s");
}

// --- criterion 2: assignment optimality -------------------------------------

void criterion_assignment() {
  const auto start = std::chrono::steady_clock::now();
  SplitMix64 rng(1002);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 1 + rng.next_below(6);
    const std::size_t c = 1 + rng.next_below(6);
    std::vector<std::vector<double>> w(r, std::vector<double>(c));
    for (auto& row : w)
      for (auto& v : row) v = rng.next_double();
    const auto assign = max_weight_assignment(w);
    const double got = assignment_total(w, assign);
    const double want = oracles::assignment_exhaustive(w);
    require(got == want, "assignment total differs from exhaustive search");
  }
  require(seconds_since(start) < 5.0, "assignment runtime exceeded 5 s");
}

// --- criterion 3: composite formula conformance ------------------------------

void criterion_composite_formula() {
  EvalConfig cfg;
  MatchedPair pair;
  pair.metrics = {0.8, 0.3, 0.5};
  const auto fixture = score_from_pairs("x", 1, 1, {pair}, cfg);
  require(fixture.c_score == 0.64, "C-Score for (0.8, 0.3, 0.5, recall 1) must be exactly 0.64");

  OneHotEmbedder embedder;
  Sample sample;
  sample.id = "a";
  sample.text = "t";
  sample.pairs = {{"华为", Stance::support}, {"美国", Stance::against}};
  Prediction pred;
  pred.id = "a";
  pred.pairs = sample.pairs;
  const auto perfect = score_sample(sample, &pred, cfg, embedder);
  require(perfect.c_score == 1.0, "perfect prediction must score exactly 1.0");

  const auto empty = score_sample(sample, nullptr, cfg, embedder);
  require(empty.recall == 0.0 && empty.c_score == 0.0, "zero recall must force C-Score 0");
}

// --- criterion 4: gating fixture and monotonicity ----------------------------

void criterion_gating() {
  EvalConfig cfg;  // default thresholds 0.7 / 0.2 / 0.4 / 0.8 / 0.3
  struct Case {
    std::vector<MetricVector> pairs;
    int pred, gold;
    bool eligible;  // does any matched pair become stance-eligible?
  };
  const MetricVector strong = {0.9, 0.5, 0.8};
  // hand-labeled cases straddling each of the five thresholds
  const std::vector<Case> cases = {
      {{{0.71, 0.5, 0.8}}, 1, 1, true},    // just above the BERTScore gate
      {{{0.69, 0.5, 0.8}}, 1, 1, false},   // just below the BERTScore gate
      {{{0.9, 0.21, 0.8}}, 1, 1, true},    // just above the BLEU gate
      {{{0.9, 0.19, 0.8}}, 1, 1, false},   // just below the BLEU gate
      {{{0.9, 0.5, 0.41}}, 1, 1, true},    // just above the ROUGE gate
      {{{0.9, 0.5, 0.39}}, 1, 1, false},   // just below the ROUGE gate
      {{strong, strong, strong, strong}, 4, 5, true},  // recall exactly 0.8
      {{strong, strong, strong}, 3, 4, false},         // recall 0.75, below its gate
      // sample C-Score 0.3667 just above the gate; only the strong pair is eligible
      {{strong, {0.3, 0.3, 0.3}, {0.0, 0.0, 0.0}}, 3, 3, true},
      // sample C-Score 0.2667 just below the gate despite the passing pair
      {{strong, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, 3, 3, false},
      {{{1.0, 1.0, 1.0}}, 1, 1, true},     // far above everything
      {{{0.1, 0.05, 0.05}}, 1, 1, false},  // far below everything
  };
  int idx = 0;
  for (const auto& c : cases) {
    std::vector<MatchedPair> matched;
    for (const auto& m : c.pairs) {
      MatchedPair pair;
      pair.metrics = m;
      matched.push_back(pair);
    }
    const auto s = score_from_pairs("x", c.pred, c.gold, matched, cfg);
    bool any_eligible = false;
    for (const bool e : s.stance_eligible) any_eligible |= e;
    require(any_eligible == c.eligible,
            "gate fixture case " + std::to_string(idx) + " misclassified");
    ++idx;
  }

  // raising any single threshold never enlarges the eligible set
  SplitMix64 rng(1004);
  for (int trial = 0; trial < 500; ++trial) {
    EvalConfig base;
    base.tau_bertscore = rng.next_double();
    base.tau_bleu = rng.next_double();
    base.tau_rouge = rng.next_double();
    base.tau_recall = rng.next_double();
    base.tau_cscore = rng.next_double();
    base.gate = rng.next_below(2) == 0 ? GateMode::pair : GateMode::sample;

    std::vector<MatchedPair> pairs;
    const int n = 1 + static_cast<int>(rng.next_below(4));
    for (int k = 0; k < n; ++k) {
      MatchedPair p;
      p.metrics = {rng.next_double(), rng.next_double(), rng.next_double()};
      pairs.push_back(p);
    }
    const int gold = n + static_cast<int>(rng.next_below(3));
    const auto before = score_from_pairs("x", n, gold, pairs, base);

    EvalConfig raised = base;
    const double bump = rng.next_double();
    switch (rng.next_below(5)) {
      case 0: raised.tau_bertscore = std::min(1.0, raised.tau_bertscore + bump); break;
      case 1: raised.tau_bleu = std::min(1.0, raised.tau_bleu + bump); break;
      case 2: raised.tau_rouge = std::min(1.0, raised.tau_rouge + bump); break;
      case 3: raised.tau_recall = std::min(1.0, raised.tau_recall + bump); break;
      default: raised.tau_cscore = std::min(1.0, raised.tau_cscore + bump); break;
    }
    const auto after = score_from_pairs("x", n, gold, pairs, raised);
    for (std::size_t k = 0; k < before.stance_eligible.size(); ++k)
      require(!after.stance_eligible[k] || before.stance_eligible[k],
              "raising a threshold enlarged the eligible set");
  }
}

// --- criterion 5: stance macro PRF fixture -----------------------------------

void criterion_stance_prf() {
  Confusion m = {};
  m[0] = {1, 1, 0};
  m[1] = {0, 1, 0};
  m[2] = {0, 0, 1};
  const auto prf = stance_prf(m, Averaging::macro);
  require(std::abs(prf.f1 * 100.0 - 77.78) <= 0.01, "macro F1 must be 77.78 on the fixture");
  require(std::abs(prf.precision * 100.0 - 83.33) <= 0.01, "macro P must be 83.33");
  require(std::abs(prf.recall * 100.0 - 83.33) <= 0.01, "macro R must be 83.33");
}

// --- criterion 6: calibration ------------------------------------------------

void criterion_calibration() {
  SplitMix64 rng(1006);
  std::vector<ComponentScores> dev;
  std::vector<double> human;
  for (int i = 0; i < 60; ++i) {
    ComponentScores c;
    c.bertscore = rng.next_double();
    c.bleu = rng.next_double();
    c.rouge_l = rng.next_double();
    c.recall = 1.0;
    dev.push_back(c);
    human.push_back(0.6 * c.bertscore + 0.2 * c.bleu + 0.2 * c.rouge_l);
  }
  const auto grid = grid_search_weights(dev, human, 0.05);
  require(grid.alpha == 0.6 && grid.beta == 0.2 && grid.gamma == 0.2,
          "grid search failed to recover the planted weights exactly");

  std::vector<double> sep_values;
  std::vector<bool> sep_labels;
  for (int i = 0; i < 50; ++i) {
    const bool positive = i % 2 == 0;
    sep_values.push_back(positive ? 0.6 + 0.3 * rng.next_double()
                                  : 0.1 + 0.3 * rng.next_double());
    sep_labels.push_back(positive);
  }
  require(threshold_sweep(sep_values, sep_labels).auc_roc == 1.0,
          "separable data must sweep to AUC 1.0");

  std::vector<double> values;
  std::vector<bool> labels;
  for (int i = 0; i < 10000; ++i) {
    values.push_back(rng.next_double());
    labels.push_back(rng.next_below(2) == 1);
  }
  const double auc = threshold_sweep(values, labels).auc_roc;
  require(std::abs(auc - 0.5) <= 0.02, "independent labels must give AUC 0.5 +- 0.02, got " +
                                           std::to_string(auc));
}

// --- criterion 7: agreement statistics ----------------------------------------

void criterion_agreement() {
  const std::vector<std::vector<int>> fixture = {{3, 0, 0}, {0, 3, 0}, {1, 1, 1}, {2, 1, 0}};
  require(std::abs(fleiss_kappa(fixture) - 11.0 / 41.0) <= 1e-9,
          "Fleiss kappa fixture must equal 11/41");

  const std::vector<std::vector<std::optional<int>>> kripp = {
      {0, 0, 0}, {0, 0, 1}, {1, 1, std::nullopt}, {0, 1, std::nullopt}, {1, 1, 1}};
  require(std::abs(krippendorff_alpha_nominal(kripp) - 3.0 / 7.0) <= 1e-9,
          "Krippendorff alpha fixture must equal 3/7");

  const std::vector<std::vector<int>> perfect = {{3, 0}, {0, 3}, {3, 0}};
  require(fleiss_kappa(perfect) == 1.0, "perfect agreement must give kappa exactly 1");

  SplitMix64 rng(1007);
  std::vector<std::vector<int>> random_counts(10000, std::vector<int>(3, 0));
  for (auto& row : random_counts)
    for (int r = 0; r < 3; ++r) ++row[rng.next_below(3)];
  const double kappa = fleiss_kappa(random_counts);
  require(std::abs(kappa) <= 0.03,
          "random ratings kappa must be within 0.03 of zero, got " + std::to_string(kappa));
}

// --- criterion 8: sampling protocol -------------------------------------------

void criterion_sampling() {
  SplitMix64 rng(1008);
  std::vector<Sample> samples;
  for (int i = 0; i < 5000; ++i) {
    Sample s;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%05d", i);
    s.id = buf;
    s.text = "t";
    const int n = 1 + static_cast<int>(rng.next_below(6));
    for (int k = 0; k < n; ++k)
      s.pairs.push_back({"t" + std::to_string(k), static_cast<Stance>(rng.next_below(3))});
    samples.push_back(std::move(s));
  }
  const auto strata = stratify(samples);
  std::size_t population = 0;
  for (const auto& [_, ids] : strata) population += ids.size();

  const std::uint64_t seeds[] = {13, 97, 233, 521, 907, 2029, 4099};
  std::map<std::string, const StratumKey*> key_of;
  for (const auto& [key, members] : strata)
    for (const auto& id : members) key_of[id] = &key;

  for (const auto seed : seeds) {
    const auto first = draw_subset(strata, 1000, seed);
    const auto second = draw_subset(strata, 1000, seed);
    require(first == second, "draws must be byte-identical across runs");
    require(first.size() == 1000, "draw size mismatch");

    std::map<const StratumKey*, std::size_t> drawn;
    for (const auto& id : first) ++drawn[key_of.at(id)];
    for (const auto& [key, members] : strata) {
      const double expected =
          1000.0 * static_cast<double>(members.size()) / static_cast<double>(population);
      require(std::abs(static_cast<double>(drawn[&key]) - expected) < 1.0,
              "stratum share deviates by one item or more");
    }
  }
  // platform independence rests on integer-only allocation plus the
  // documented SplitMix64 recurrence; two in-process runs are checked above.

  const auto agg = aggregate_runs({1.0, 2.0, 3.0});
  require(std::abs(agg.mean - 2.0) <= 1e-12, "aggregate mean");
  require(std::abs(agg.t_value - 4.303) <= 5e-4, "t quantile for K=3 must be 4.303");
  require(std::abs((agg.ci_hi - agg.mean) - 2.484) <= 1e-3, "CI half-width must be 2.484");
  const auto agg7 = aggregate_runs({1, 2, 3, 4, 5, 6, 7});
  require(std::abs(agg7.t_value - 2.447) <= 5e-4, "t quantile for K=7 must be 2.447");
}

// --- criterion 9: annotation pipeline -----------------------------------------

void criterion_pipeline() {
  // 27 x 27 single-pair truth table through the full pipeline w/ mock clients
  testutil::TempDir tmp;
  const std::array<std::string, 3> target_names = {"T1", "T2", "T3"};
  const std::array<std::string, 3> stance_names = {"support", "against", "neutral"};

  std::vector<Sample> samples;
  std::map<std::string, std::string> a, b, c, s;
  struct Expected {
    bool valid;
    std::set<std::pair<std::string, int>> pairs;
  };
  std::map<std::string, Expected> expected;

  for (int tmask = 0; tmask < 27; ++tmask) {
    for (int smask = 0; smask < 27; ++smask) {
      const std::string id = "case" + std::to_string(tmask) + "_" + std::to_string(smask);
      Sample sample;
      sample.id = id;
      sample.text = "样本 " + id;
      sample.pairs = {{"占位", Stance::neutral}};
      samples.push_back(std::move(sample));

      const std::array<int, 3> t = {tmask % 3, (tmask / 3) % 3, tmask / 9};
      const std::array<int, 3> st = {smask % 3, (smask / 3) % 3, smask / 9};
      auto reply = [&](int m) {
        return "[{\"target\":\"" + target_names[static_cast<std::size_t>(t[static_cast<std::size_t>(m)])] +
               "\",\"stance\":\"" + stance_names[static_cast<std::size_t>(st[static_cast<std::size_t>(m)])] +
               "\"}]";
      };
      a[id] = reply(0);
      b[id] = reply(1);
      c[id] = reply(2);
      s[id] = "score: 10";

      // rule restated independently (single pair per model)
      Expected e{false, {}};
      bool conflict = false;
      for (int target = 0; target < 3; ++target) {
        std::vector<int> stances;
        for (int m = 0; m < 3; ++m)
          if (t[static_cast<std::size_t>(m)] == target)
            stances.push_back(st[static_cast<std::size_t>(m)]);
        if (stances.size() < 2) continue;
        std::array<int, 3> tally = {0, 0, 0};
        for (int v : stances) ++tally[static_cast<std::size_t>(v)];
        int majority = -1;
        for (int v = 0; v < 3; ++v)
          if (tally[static_cast<std::size_t>(v)] >= 2) majority = v;
        if (majority < 0)
          conflict = true;
        else
          e.pairs.insert({target_names[static_cast<std::size_t>(target)], majority});
      }
      e.valid = !conflict && !e.pairs.empty();
      if (!e.valid) e.pairs.clear();
      expected[id] = std::move(e);
    }
  }

  MapClient ca("A", a), cb("B", b), cc("C", c), scorer("S", s);
  PipelineConfig cfg;
  cfg.out_dir = tmp.path.string();
  cfg.max_attempts = 1;
  const auto report = run_pipeline(samples, {&ca, &cb, &cc}, scorer, cfg);
  require(report.annotated + report.review + report.dropped + report.deferred == report.input,
          "flow conservation violated on the truth table");

  // recover routed ids and consensus pairs from the output files
  std::map<std::string, std::set<std::pair<std::string, int>>> annotated;
  for_each_jsonl(tmp.path.string() + "/annotated.jsonl",
                 [&](std::size_t, const nlohmann::json& obj) {
                   std::set<std::pair<std::string, int>> pairs;
                   for (const auto& p : obj["pairs"]) {
                     const auto stance = parse_stance(p["stance"].get<std::string>());
                     pairs.insert({p["target"].get<std::string>(),
                                   static_cast<int>(*stance)});
                   }
                   annotated[obj["id"].get<std::string>()] = std::move(pairs);
                 });
  std::set<std::string> dropped;
  for_each_jsonl(tmp.path.string() + "/dropped.jsonl",
                 [&](std::size_t, const nlohmann::json& obj) {
                   dropped.insert(obj["id"].get<std::string>());
                 });

  for (const auto& [id, e] : expected) {
    if (e.valid) {
      require(annotated.count(id) == 1, "case " + id + " should be annotated");
      require(annotated[id] == e.pairs, "case " + id + " consensus pairs differ from the rule");
    } else {
      require(dropped.count(id) == 1, "case " + id + " should be dropped");
    }
  }

  // flow conservation under 1,000 fuzzed pipelines
  SplitMix64 rng(1009);
  for (int run = 0; run < 1000; ++run) {
    testutil::TempDir fuzz_dir;
    std::vector<Sample> fuzz_samples;
    std::map<std::string, std::string> fa, fb, fc, fs;
    const int n = 1 + static_cast<int>(rng.next_below(5));
    for (int i = 0; i < n; ++i) {
      const std::string id = "s" + std::to_string(i);
      Sample sample;
      sample.id = id;
      sample.text = "文本";
      sample.pairs = {{"占位", Stance::neutral}};
      fuzz_samples.push_back(std::move(sample));
      auto reply = [&]() -> std::string {
        switch (rng.next_below(5)) {
          case 0: return "[{\"target\":\"T" + std::to_string(rng.next_below(3)) +
                         "\",\"stance\":\"support\"}]";
          case 1: return "[{\"target\":\"T" + std::to_string(rng.next_below(3)) +
                         "\",\"stance\":\"against\"}]";
          case 2: return "目标: T" + std::to_string(rng.next_below(3)) + " 立场: 中立";
          case 3: return "完全无法解析的回复";
          default: return "[]";
        }
      };
      if (rng.next_below(8) != 0) fa[id] = reply();
      if (rng.next_below(8) != 0) fb[id] = reply();
      if (rng.next_below(8) != 0) fc[id] = reply();
      switch (rng.next_below(4)) {
        case 0: fs[id] = "score: " + std::to_string(rng.next_below(11)); break;
        case 1: fs[id] = "看起来不错"; break;
        case 2: fs[id] = "score: 3, 建议修改"; break;
        default: break;  // scorer outage
      }
    }
    MapClient ma("A", fa), mb("B", fb), mc("C", fc), ms("S", fs);
    PipelineConfig fuzz_cfg;
    fuzz_cfg.out_dir = fuzz_dir.path.string();
    fuzz_cfg.max_attempts = 1;
    fuzz_cfg.concurrency = 1 + static_cast<int>(rng.next_below(4));
    const auto fuzz_report = run_pipeline(fuzz_samples, {&ma, &mb, &mc}, ms, fuzz_cfg);
    require(fuzz_report.annotated + fuzz_report.review + fuzz_report.dropped +
                    fuzz_report.deferred ==
                fuzz_report.input,
            "flow conservation violated on fuzzed run " + std::to_string(run));
  }
}

// --- criterion 10: released dataset statistics ---------------------------------

void criterion_dataset_stats() {
  const char* env = std::getenv("STANCEVAL_DATASET_JSONL");
  std::string path = env ? env : "data/dataset.jsonl";
  if (!std::filesystem::exists(path))
    throw Skip{"released dataset not present (set STANCEVAL_DATASET_JSONL or place it at "
               "data/dataset.jsonl)"};

  const char* map_env = std::getenv("STANCEVAL_FIELDMAP");
  const auto samples =
      map_env ? load_dataset(path, FieldMap::parse(map_env)) : load_dataset(path);
  const auto stats = dataset_stats(samples);
  require(stats.total == 70931, "total must be 70,931");
  require(stats.by_bucket[0] == 27148, "single bucket must be 27,148");
  require(stats.by_bucket[1] == 25312, "dual bucket must be 25,312");
  require(stats.by_bucket[2] == 9835, "triple bucket must be 9,835");
  require(stats.by_bucket[3] == 8636, "multi bucket must be 8,636");
  require(stats.stance_total[0] == 72705, "support total must be 72,705");
  require(stats.stance_total[1] == 30029, "against total must be 30,029");
  require(stats.stance_total[2] == 51618, "neutral total must be 51,618");
  bool found = false;
  for (const auto& row : stats.targets) {
    if (row.target == "USA") {
      found = true;
      require(row.count == 907 && row.by_stance[0] == 112 && row.by_stance[1] == 560 &&
                  row.by_stance[2] == 235,
              "USA row must be 907 (112/560/235)");
    }
  }
  require(found, "USA row missing from the target table");
}

// --- criterion 11: end-to-end performance --------------------------------------

void criterion_performance() {
  SplitMix64 rng(1011);
  std::vector<Sample> samples;
  std::vector<Prediction> preds;
  auto synth_target = [&](int tokens) {
    std::string t;
    for (int k = 0; k < tokens; ++k)
      append_utf8(t, static_cast<char32_t>(0x4E00 + rng.next_below(2000)));
    return t;
  };
  for (int i = 0; i < 7000; ++i) {
    Sample s;
    s.id = "s" + std::to_string(i);
    s.text = "t";
    const int targets = 2 + static_cast<int>(rng.next_below(6));
    for (int t = 0; t < targets; ++t)
      s.pairs.push_back({synth_target(6 + static_cast<int>(rng.next_below(18))),
                         static_cast<Stance>(rng.next_below(3))});
    Prediction p;
    p.id = s.id;
    for (const auto& gold : s.pairs) {
      std::string guess = gold.target;
      if (rng.next_below(2) == 0 && guess.size() > 3) guess.resize(guess.size() - 3);
      p.pairs.push_back({guess, gold.stance});
    }
    samples.push_back(std::move(s));
    preds.push_back(std::move(p));
  }

  OneHotEmbedder embedder;
  EvalConfig cfg;
  const auto t0 = std::chrono::steady_clock::now();
  const auto serial = score_corpus_serial(samples, preds, cfg, embedder);
  const auto t1 = std::chrono::steady_clock::now();
  const auto parallel = score_corpus(samples, preds, cfg, embedder, 4);
  const auto t2 = std::chrono::steady_clock::now();

  const double ts = std::chrono::duration<double>(t1 - t0).count();
  const double tp = std::chrono::duration<double>(t2 - t1).count();
  for (std::size_t i = 0; i < serial.size(); ++i)
    require(serial[i].c_score == parallel[i].c_score,
            "parallel scorer must match the serial reference");

  std::printf("        [timing] serial %.2f s, 4 workers %.2f s, speedup %.2fx\n", ts, tp,
              ts / tp);
  require(ts + tp < 60.0, "evaluating 7x1000 samples must finish within 60 s");
  require(ts / tp >= 2.0, "parallel speedup with 4 workers must reach 2x, measured " +
                              std::to_string(ts / tp) + "x");
}

struct Criterion {
  int number;
  const char* name;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "metric oracles (rouge/bleu/bert_score)", criterion_metric_oracles},
      {2, "assignment optimality vs exhaustive search", criterion_assignment},
      {3, "composite score conformance", criterion_composite_formula},
      {4, "threshold gating fixture and monotonicity", criterion_gating},
      {5, "stance macro PRF fixture", criterion_stance_prf},
      {6, "weight grid search and threshold sweeps", criterion_calibration},
      {7, "agreement statistics fixtures", criterion_agreement},
      {8, "stratified sampling protocol", criterion_sampling},
      {9, "annotation pipeline truth table and flow conservation", criterion_pipeline},
      {10, "released dataset statistics", criterion_dataset_stats},
      {11, "end-to-end performance and parallel speedup", criterion_performance},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      criterion.run();
      std::printf("[PASS] criterion %2d: %s\n", criterion.number, criterion.name);
    } catch (const Skip& skip) {
      std::printf("[SKIP] criterion %2d: %s -- %s\n", criterion.number, criterion.name,
                  skip.reason.c_str());
    } catch (const Failure& failure) {
      std::printf("[FAIL] criterion %2d: %s -- %s\n", criterion.number, criterion.name,
                  failure.message.c_str());
      ++failures;
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion %2d: %s -- unexpected error: %s\n", criterion.number,
                  criterion.name, e.what());
      ++failures;
    }
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
