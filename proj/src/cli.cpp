#include "stanceval/cli.hpp"

#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "CLI11.hpp"
#include "json.hpp"
#include "stanceval/agreement.hpp"
#include "stanceval/annotation.hpp"
#include "stanceval/calibration.hpp"
#include "stanceval/dataset.hpp"
#include "stanceval/error.hpp"
#include "stanceval/report.hpp"
#include "stanceval/rng.hpp"
#include "stanceval/sampling.hpp"
#include "stanceval/stance_eval.hpp"
#include "stanceval/target_eval.hpp"

namespace stanceval {

namespace {

constexpr const char* kVersion = "stanceval 0.1.0";

namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::vector<std::string>& args,
                    const std::vector<std::string>& input_paths, const nlohmann::json& config) {
  nlohmann::json manifest;
  manifest["tool"] = kVersion;
  manifest["command"] = command;
  manifest["args"] = args;
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& path : input_paths) {
    nlohmann::json entry;
    entry["path"] = path;
    try {
      entry["fnv1a64"] = hex64(fnv1a64(read_file(path)));
    } catch (const Error&) {
      entry["fnv1a64"] = nullptr;
    }
    inputs[path] = entry;
  }
  manifest["inputs"] = inputs;
  manifest["config"] = config;
  manifest["config_hash"] = hex64(fnv1a64(config.dump()));
  write_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

std::unique_ptr<EmbeddingProvider> make_embedder(const std::string& kind,
                                                 const std::string& endpoint) {
  if (kind == "onehot") return std::make_unique<OneHotEmbedder>();
  if (kind == "remote") {
    if (endpoint.empty())
      throw Error("BadArgument", "--embedder remote requires --endpoint");
    return std::make_unique<RemoteEmbedder>(endpoint);
  }
  throw Error("BadArgument", "unknown embedder: " + kind);
}

// Optional JSON config file with the same keys the manifest records;
// explicit CLI flags override it.
EvalConfig config_from_file(const std::string& path) {
  EvalConfig cfg;
  const nlohmann::json obj = nlohmann::json::parse(read_file(path), nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw Error("MalformedConfig", path + " is not a JSON object");
  cfg.alpha = obj.value("alpha", cfg.alpha);
  cfg.beta = obj.value("beta", cfg.beta);
  cfg.gamma = obj.value("gamma", cfg.gamma);
  cfg.tau_bertscore = obj.value("tau_bertscore", cfg.tau_bertscore);
  cfg.tau_bleu = obj.value("tau_bleu", cfg.tau_bleu);
  cfg.tau_rouge = obj.value("tau_rouge", cfg.tau_rouge);
  cfg.tau_recall = obj.value("tau_recall", cfg.tau_recall);
  cfg.tau_cscore = obj.value("tau_cscore", cfg.tau_cscore);
  if (obj.contains("tokenize")) cfg.granularity = parse_granularity(obj["tokenize"].get<std::string>());
  if (obj.contains("gate")) cfg.gate = parse_gate_mode(obj["gate"].get<std::string>());
  cfg.match_floor = obj.value("match_floor", cfg.match_floor);
  return cfg;
}

EvalConfig build_config(const std::string& config_path, const std::vector<double>& weights,
                        const std::vector<double>& thresholds, const std::string& tokenize_mode,
                        const std::string& gate_mode, double match_floor) {
  EvalConfig cfg;
  if (!config_path.empty()) cfg = config_from_file(config_path);
  if (!weights.empty()) {
    if (weights.size() != 3) throw Error("BadArgument", "--weights needs a,b,c");
    cfg.alpha = weights[0];
    cfg.beta = weights[1];
    cfg.gamma = weights[2];
  }
  if (!thresholds.empty()) {
    if (thresholds.size() != 5)
      throw Error("BadArgument", "--thresholds needs five values (BS,BLEU,ROUGE,Recall,C)");
    cfg.tau_bertscore = thresholds[0];
    cfg.tau_bleu = thresholds[1];
    cfg.tau_rouge = thresholds[2];
    cfg.tau_recall = thresholds[3];
    cfg.tau_cscore = thresholds[4];
  }
  if (!tokenize_mode.empty()) cfg.granularity = parse_granularity(tokenize_mode);
  if (!gate_mode.empty()) cfg.gate = parse_gate_mode(gate_mode);
  if (match_floor >= 0.0) cfg.match_floor = match_floor;
  cfg.validate();
  return cfg;
}

nlohmann::json config_json(const EvalConfig& cfg) {
  return {{"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"gamma", cfg.gamma},
          {"tau_bertscore", cfg.tau_bertscore},
          {"tau_bleu", cfg.tau_bleu},
          {"tau_rouge", cfg.tau_rouge},
          {"tau_recall", cfg.tau_recall},
          {"tau_cscore", cfg.tau_cscore},
          {"tokenize", to_string(cfg.granularity)},
          {"gate", to_string(cfg.gate)},
          {"match_floor", cfg.match_floor}};
}

std::string scores_to_jsonl(const std::vector<Sample>& samples,
                            const std::vector<Prediction>& predictions,
                            const std::vector<SampleScore>& scores) {
  std::unordered_map<std::string, const Sample*> sample_by_id;
  for (const auto& s : samples) sample_by_id[s.id] = &s;
  std::unordered_map<std::string, std::vector<TargetStancePair>> pred_by_id;
  for (const auto& p : predictions) {
    std::vector<TargetStancePair> deduped;
    std::unordered_set<std::string> seen;
    for (const auto& pair : p.pairs)
      if (seen.insert(pair.target).second) deduped.push_back(pair);
    pred_by_id[p.id] = std::move(deduped);
  }

  std::string out;
  for (const auto& s : scores) {
    nlohmann::json pairs = nlohmann::json::array();
    const auto* sample = sample_by_id.at(s.id);
    const auto pit = pred_by_id.find(s.id);
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
      const auto& mp = s.pairs[k];
      nlohmann::json rec = {{"pred_index", mp.pred_index},
                            {"gold_index", mp.gold_index},
                            {"bertscore", mp.metrics.bertscore},
                            {"bleu", mp.metrics.bleu},
                            {"rouge_l", mp.metrics.rouge_l},
                            {"combined", mp.combined},
                            {"pair_gate", static_cast<bool>(s.pair_gate[k])},
                            {"eligible", static_cast<bool>(s.stance_eligible[k])}};
      rec["gold_target"] = sample->pairs[static_cast<std::size_t>(mp.gold_index)].target;
      if (pit != pred_by_id.end())
        rec["pred_target"] = pit->second[static_cast<std::size_t>(mp.pred_index)].target;
      pairs.push_back(std::move(rec));
    }
    nlohmann::json obj = {{"id", s.id},
                          {"pred_count", s.pred_count},
                          {"gold_count", s.gold_count},
                          {"bertscore", s.sample.bertscore},
                          {"bleu", s.sample.bleu},
                          {"rouge_l", s.sample.rouge_l},
                          {"recall", s.recall},
                          {"c_score", s.c_score},
                          {"gate", s.sample_gate},
                          {"missing", s.missing_prediction},
                          {"pairs", pairs}};
    out += obj.dump();
    out += "\n";
  }
  return out;
}

Table report_table(const CorpusReport& report, const std::vector<ReportRow>& extra_rows) {
  Table t;
  t.header = {"Group", "Samples", "BERT-S", "BLEU", "ROUGE", "Recall", "C-Score"};
  auto emit = [&](const ReportRow& row) {
    t.rows.push_back({row.label, std::to_string(row.samples), format_pct(row.means.bertscore),
                      format_pct(row.means.bleu), format_pct(row.means.rouge_l),
                      format_pct(row.recall), format_pct(row.c_score)});
  };
  emit(report.overall);
  for (const auto& row : report.by_bucket) emit(row);
  for (const auto& row : extra_rows) emit(row);
  return t;
}

struct LoadedScores {
  std::vector<std::string> ids;
  std::vector<ComponentScores> components;
  std::vector<double> c_scores;
  std::vector<bool> gates;
};

LoadedScores load_scores_jsonl(const std::string& path) {
  LoadedScores out;
  for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& obj) {
    const std::string where = path + ":" + std::to_string(line_no);
    if (!obj.contains("id"))
      throw Error("MalformedLine", where + ": missing \"id\"");
    out.ids.push_back(obj["id"].get<std::string>());
    ComponentScores c;
    c.bertscore = obj.at("bertscore").get<double>();
    c.bleu = obj.at("bleu").get<double>();
    c.rouge_l = obj.at("rouge_l").get<double>();
    c.recall = obj.at("recall").get<double>();
    out.components.push_back(c);
    out.c_scores.push_back(obj.at("c_score").get<double>());
    out.gates.push_back(obj.value("gate", false));
  });
  return out;
}

std::vector<std::string> read_id_list(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string gold, pred, out = "eval_out", config, field_map;
  std::vector<double> weights, thresholds;
  std::string tokenize_mode, gate_mode, avg = "macro";
  std::string embedder = "onehot", endpoint;
  double match_floor = -1.0;  // unset
  int threads = 0;
  bool flag_breakdown = false;
  std::vector<std::string> subsets;
};

int cmd_evaluate(const EvaluateArgs& a, const std::vector<std::string>& argv) {
  const EvalConfig cfg = build_config(a.config, a.weights, a.thresholds, a.tokenize_mode,
                                      a.gate_mode, a.match_floor);
  const auto samples = a.field_map.empty() ? load_dataset(a.gold)
                                         : load_dataset(a.gold, FieldMap::parse(a.field_map));
  const auto predictions = load_predictions(a.pred);
  auto provider = make_embedder(a.embedder, a.endpoint);
  int threads = a.threads;
  if (threads == 0 && a.embedder == "remote") threads = 4;  // bounded concurrent requests

  fs::create_directories(a.out);

  std::unordered_set<std::string> gold_ids;
  for (const auto& s : samples) gold_ids.insert(s.id);
  std::int64_t unknown_preds = 0;
  for (const auto& p : predictions)
    if (!gold_ids.count(p.id)) ++unknown_preds;

  const auto scores = score_corpus(samples, predictions, cfg, *provider, threads);
  const auto report = corpus_target_report(scores);

  std::vector<ReportRow> extra;
  if (a.flag_breakdown)
    extra = flag_breakdown_report(samples, predictions, cfg, *provider);
  const Table target_table = report_table(report, extra);

  std::string text = "Target identification\n" + target_table.to_text();
  std::string md = "## Target identification\n\n" + target_table.to_markdown();

  // Stance detection over eligible pairs
  const auto stance_pairs = eligible_stance_pairs(samples, predictions, scores);
  const Confusion confusion = stance_confusion(stance_pairs);
  Table stance_table;
  stance_table.header = {"Averaging", "P", "R", "F1", "EligiblePairs"};
  std::string stance_note;
  try {
    const Prf prf = stance_prf(confusion, parse_averaging(a.avg));
    stance_table.rows.push_back({a.avg, format_pct(prf.precision), format_pct(prf.recall),
                                 format_pct(prf.f1), std::to_string(stance_pairs.size())});
  } catch (const Error& e) {
    stance_note = std::string("stance detection skipped: ") + e.what() + "\n";
  }
  text += "\nStance detection\n" +
          (stance_note.empty() ? stance_table.to_text() : stance_note);
  md += "\n## Stance detection\n\n" +
        (stance_note.empty() ? stance_table.to_markdown() : stance_note);

  Table confusion_table;
  confusion_table.header = {"gold\\pred", "support", "against", "neutral"};
  for (std::size_t g = 0; g < 3; ++g) {
    confusion_table.rows.push_back({std::string(to_string(static_cast<Stance>(g))),
                                    std::to_string(confusion[g][0]),
                                    std::to_string(confusion[g][1]),
                                    std::to_string(confusion[g][2])});
  }

  // Multi-draw evaluation: one row per subset id-list plus mean/std/CI.
  if (!a.subsets.empty()) {
    std::unordered_map<std::string, const Sample*> by_id;
    for (const auto& s : samples) by_id[s.id] = &s;
    std::vector<std::vector<double>> columns(5);  // BS, BLEU, ROUGE, Recall, C
    Table subset_table;
    subset_table.header = {"Subset", "Samples", "BERT-S", "BLEU", "ROUGE", "Recall", "C-Score"};
    for (const auto& subset_path : a.subsets) {
      std::vector<Sample> chosen;
      for (const auto& id : read_id_list(subset_path)) {
        const auto it = by_id.find(id);
        if (it == by_id.end())
          throw Error("UnknownId", subset_path + ": id not in gold set: " + id);
        chosen.push_back(*it->second);
      }
      const auto sub_scores = score_corpus(chosen, predictions, cfg, *provider, threads);
      const auto sub_report = corpus_target_report(sub_scores);
      const auto& r = sub_report.overall;
      subset_table.rows.push_back({fs::path(subset_path).filename().string(),
                                   std::to_string(r.samples), format_pct(r.means.bertscore),
                                   format_pct(r.means.bleu), format_pct(r.means.rouge_l),
                                   format_pct(r.recall), format_pct(r.c_score)});
      columns[0].push_back(r.means.bertscore);
      columns[1].push_back(r.means.bleu);
      columns[2].push_back(r.means.rouge_l);
      columns[3].push_back(r.recall);
      columns[4].push_back(r.c_score);
    }
    text += "\nSubset draws\n" + subset_table.to_text();
    md += "\n## Subset draws\n\n" + subset_table.to_markdown();
    if (a.subsets.size() >= 2) {
      Table agg_table;
      agg_table.header = {"Metric", "Mean", "Std", "CI95-lo", "CI95-hi"};
      const std::array<std::string, 5> names = {"BERT-S", "BLEU", "ROUGE", "Recall", "C-Score"};
      for (std::size_t m = 0; m < 5; ++m) {
        const RunAggregate agg = aggregate_runs(columns[m]);
        agg_table.rows.push_back({names[m], format_pct(agg.mean), format_pct(agg.stddev),
                                  format_pct(agg.ci_lo), format_pct(agg.ci_hi)});
      }
      text += "\nAcross draws (mean, std, 95% CI)\n" + agg_table.to_text();
      md += "\n## Across draws\n\n" + agg_table.to_markdown();
      write_file(a.out + "/aggregate.csv", agg_table.to_csv());
    }
  }

  if (report.missing_predictions > 0)
    text += "\nwarning: " + std::to_string(report.missing_predictions) +
            " samples had no prediction (scored as empty)\n";
  if (unknown_preds > 0)
    text += "warning: " + std::to_string(unknown_preds) +
            " predictions had ids outside the gold set (ignored)\n";

  write_file(a.out + "/report.txt", text);
  write_file(a.out + "/report.csv", target_table.to_csv());
  write_file(a.out + "/report.md", md);
  write_file(a.out + "/stance.csv", stance_table.to_csv());
  write_file(a.out + "/confusion.csv", confusion_table.to_csv());
  write_file(a.out + "/scores.jsonl", scores_to_jsonl(samples, predictions, scores));

  nlohmann::json cfg_json = config_json(cfg);
  cfg_json["avg"] = a.avg;
  cfg_json["embedder"] = a.embedder;
  cfg_json["threads"] = threads;
  std::vector<std::string> inputs = {a.gold, a.pred};
  if (!a.config.empty()) inputs.push_back(a.config);
  write_manifest(a.out, "evaluate", argv, inputs, cfg_json);
  std::cout << text;
  return 0;
}

// ---- calibrate ----

struct CalibrateArgs {
  std::string scores, judgments, out = "calibrate_out";
  double step = 0.05;
  std::string corr = "spearman";
};

int cmd_calibrate(const CalibrateArgs& a, const std::vector<std::string>& argv) {
  const LoadedScores scores = load_scores_jsonl(a.scores);
  const auto judgments = load_judgments(a.judgments);
  std::unordered_map<std::string, double> quality_by_id;
  for (const auto& j : judgments)
    if (j.quality) quality_by_id[j.id] = *j.quality;

  std::vector<ComponentScores> dev;
  std::vector<double> human;
  for (std::size_t i = 0; i < scores.ids.size(); ++i) {
    const auto it = quality_by_id.find(scores.ids[i]);
    if (it == quality_by_id.end()) continue;
    dev.push_back(scores.components[i]);
    human.push_back(it->second);
  }
  const GridSearchResult result =
      grid_search_weights(dev, human, a.step, parse_correlation(a.corr));

  fs::create_directories(a.out);
  nlohmann::json out = {{"alpha", result.alpha},
                        {"beta", result.beta},
                        {"gamma", result.gamma},
                        {"correlation", result.correlation},
                        {"objective", a.corr},
                        {"step", a.step},
                        {"paired_observations", dev.size()}};
  write_file(a.out + "/calibration.json", out.dump(2) + "\n");
  write_manifest(a.out, "calibrate", argv, {a.scores, a.judgments},
                 {{"step", a.step}, {"corr", a.corr}});
  std::cout << "weights: alpha=" << result.alpha << " beta=" << result.beta
            << " gamma=" << result.gamma << "  (" << a.corr << " " << result.correlation
            << ", n=" << dev.size() << ")\n";
  return 0;
}

// ---- thresholds ----

struct ThresholdsArgs {
  std::string scores, judgments, out = "thresholds_out";
  std::string select = "f1";
};

int cmd_thresholds(const ThresholdsArgs& a, const std::vector<std::string>& argv) {
  const LoadedScores scores = load_scores_jsonl(a.scores);
  const auto judgments = load_judgments(a.judgments);
  std::unordered_map<std::string, bool> correct_by_id;
  for (const auto& j : judgments)
    if (j.correct) correct_by_id[j.id] = *j.correct;

  std::vector<std::array<double, 5>> metric_rows;
  std::vector<bool> labels;
  std::vector<bool> gates;
  for (std::size_t i = 0; i < scores.ids.size(); ++i) {
    const auto it = correct_by_id.find(scores.ids[i]);
    if (it == correct_by_id.end()) continue;
    const auto& c = scores.components[i];
    metric_rows.push_back({c.bertscore, c.bleu, c.rouge_l, c.recall, scores.c_scores[i]});
    labels.push_back(it->second);
    gates.push_back(scores.gates[i]);
  }
  if (metric_rows.empty())
    throw Error("EmptyInput", "no overlap between scores and correctness judgments");

  fs::create_directories(a.out);
  const std::array<std::string, 5> names = {"bertscore", "bleu", "rouge_l", "recall", "c_score"};
  const std::array<double, 5> reference_defaults = {0.7, 0.2, 0.4, 0.8, 0.3};
  const ThresholdSelection selection = parse_selection(a.select);

  nlohmann::json summary = nlohmann::json::array();
  for (std::size_t m = 0; m < 5; ++m) {
    std::vector<double> values;
    values.reserve(metric_rows.size());
    for (const auto& row : metric_rows) values.push_back(row[m]);
    const SweepResult sweep = threshold_sweep(values, labels, selection);

    Table curve;
    curve.header = {"threshold", "TPR", "FPR", "P", "R"};
    for (const auto& pt : sweep.points)
      curve.rows.push_back({format_num(pt.threshold, 6), format_num(pt.tpr, 6),
                            format_num(pt.fpr, 6), format_num(pt.precision, 6),
                            format_num(pt.recall, 6)});
    write_file(a.out + "/" + names[m] + "_curve.csv", curve.to_csv());

    summary.push_back({{"metric", names[m]},
                       {"auc_roc", sweep.auc_roc},
                       {"auc_pr", sweep.auc_pr},
                       {"chosen_threshold", sweep.chosen_threshold},
                       {"criterion", sweep.criterion},
                       {"reference_default", reference_defaults[m]}});
    std::cout << names[m] << ": AUC-ROC " << format_num(sweep.auc_roc, 4) << ", AUC-PR "
              << format_num(sweep.auc_pr, 4) << ", chosen " << sweep.chosen_threshold
              << " (default " << reference_defaults[m] << ")\n";
  }
  const double agreement = human_agreement(gates, labels);
  std::cout << "gate agreement with human labels: " << format_pct(agreement) << "%\n";

  nlohmann::json out = {{"metrics", summary},
                        {"gate_agreement", agreement},
                        {"labelled_samples", labels.size()}};
  write_file(a.out + "/thresholds.json", out.dump(2) + "\n");
  write_manifest(a.out, "thresholds", argv, {a.scores, a.judgments}, {{"select", a.select}});
  return 0;
}

// ---- sample ----

struct SampleArgs {
  std::string gold, out = "sample_out", field_map;
  std::size_t size = 1000;
  std::vector<std::uint64_t> seeds = {13, 97, 233, 521, 907, 2029, 4099};
  std::string strata = "bucket+stance";
};

int cmd_sample(const SampleArgs& a, const std::vector<std::string>& argv) {
  const auto samples = a.field_map.empty() ? load_dataset(a.gold)
                                           : load_dataset(a.gold, FieldMap::parse(a.field_map));
  const auto strata = stratify(samples, parse_strata_mode(a.strata));
  fs::create_directories(a.out);

  nlohmann::json manifest_draws = nlohmann::json::array();
  for (const auto seed : a.seeds) {
    const auto ids = draw_subset(strata, a.size, seed);
    std::string content;
    for (const auto& id : ids) {
      content += id;
      content += "\n";
    }
    const std::string name = "subset_seed" + std::to_string(seed) + ".txt";
    write_file(a.out + "/" + name, content);
    manifest_draws.push_back(
        {{"seed", seed}, {"file", name}, {"size", ids.size()}, {"fnv1a64", hex64(fnv1a64(content))}});
  }
  write_manifest(a.out, "sample", argv, {a.gold},
                 {{"size", a.size},
                  {"seeds", a.seeds},
                  {"strata", a.strata},
                  {"draws", manifest_draws},
                  {"strata_count", strata.size()}});
  std::cout << a.seeds.size() << " draws of " << a.size << " ids written to " << a.out << "\n";
  return 0;
}

// ---- stats ----

struct StatsArgs {
  std::string gold, out = "stats_out", field_map;
  std::size_t top = 10;
};

int cmd_stats(const StatsArgs& a, const std::vector<std::string>& argv) {
  const auto samples = a.field_map.empty() ? load_dataset(a.gold)
                                           : load_dataset(a.gold, FieldMap::parse(a.field_map));
  const DatasetStats stats = dataset_stats(samples);
  fs::create_directories(a.out);

  Table dist;
  dist.header = {"Target", "Number", "Support", "Against", "Neutral"};
  for (std::size_t b = 0; b < 4; ++b) {
    std::string label(kBucketNames[b]);
    label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    dist.rows.push_back({label, std::to_string(stats.by_bucket[b]),
                         std::to_string(stats.stance_by_bucket[b][0]),
                         std::to_string(stats.stance_by_bucket[b][1]),
                         std::to_string(stats.stance_by_bucket[b][2])});
  }
  dist.rows.push_back({"Total", std::to_string(stats.total), std::to_string(stats.stance_total[0]),
                       std::to_string(stats.stance_total[1]),
                       std::to_string(stats.stance_total[2])});

  Table top;
  top.header = {"Target", "Number", "Support", "Against", "Neutral"};
  for (std::size_t i = 0; i < stats.targets.size() && i < a.top; ++i) {
    const auto& row = stats.targets[i];
    top.rows.push_back({row.target, std::to_string(row.count), std::to_string(row.by_stance[0]),
                        std::to_string(row.by_stance[1]), std::to_string(row.by_stance[2])});
  }

  const std::string text = "Target quantity and stance distribution\n" + dist.to_text() +
                           "\nTop " + std::to_string(a.top) + " targets\n" + top.to_text();
  write_file(a.out + "/stats.txt", text);
  write_file(a.out + "/distribution.csv", dist.to_csv());
  write_file(a.out + "/top_targets.csv", top.to_csv());
  write_manifest(a.out, "stats", argv, {a.gold}, {{"top", a.top}});
  std::cout << text;
  return 0;
}

// ---- iaa ----

struct IaaArgs {
  std::string ratings, out = "iaa_out";
  int bootstrap = 2000;
  double level = 0.95;
  std::uint64_t seed = 13;
};

int cmd_iaa(const IaaArgs& a, const std::vector<std::string>& argv) {
  const auto ratings = load_ratings(a.ratings);
  const IaaReport report = iaa_report(ratings, a.bootstrap, a.level, a.seed);
  fs::create_directories(a.out);

  nlohmann::json out = {{"fleiss_kappa", report.fleiss},
                        {"fleiss_kappa_ci", {report.fleiss_ci.lo, report.fleiss_ci.hi}},
                        {"krippendorff_alpha", report.krippendorff},
                        {"exact_match", report.exact_match},
                        {"kappa_items", report.kappa_items},
                        {"alpha_items", report.alpha_items},
                        {"samples", report.samples},
                        {"bootstrap", a.bootstrap},
                        {"level", a.level},
                        {"seed", a.seed}};
  write_file(a.out + "/iaa.json", out.dump(2) + "\n");

  std::string adjudication_out;
  for (const auto& entry : adjudicate(ratings)) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : entry.final_pairs)
      pairs.push_back({{"target", p.target}, {"stance", std::string(to_string(p.stance))}});
    adjudication_out += nlohmann::json{{"id", entry.id},
                                       {"status", std::string(to_string(entry.status))},
                                       {"final_pairs", pairs}}
                            .dump();
    adjudication_out += "\n";
  }
  write_file(a.out + "/adjudication.jsonl", adjudication_out);
  write_manifest(a.out, "iaa", argv, {a.ratings},
                 {{"bootstrap", a.bootstrap}, {"level", a.level}, {"seed", a.seed}});
  std::cout << "Fleiss kappa " << format_num(report.fleiss, 4) << " [" << format_num(report.fleiss_ci.lo, 4)
            << ", " << format_num(report.fleiss_ci.hi, 4) << "], Krippendorff alpha "
            << format_num(report.krippendorff, 4) << ", exact match "
            << format_pct(report.exact_match) << "%\n";
  return 0;
}

// ---- annotate ----

struct AnnotateArgs {
  std::string input, config, out = "annotate_out";
  int concurrency = 0;
  bool strict = false;
};

int cmd_annotate(const AnnotateArgs& a, const std::vector<std::string>& argv) {
  const auto samples = load_dataset(a.input);
  LoadedPipeline pipeline = load_pipeline_config(a.config);
  fs::create_directories(a.out);
  pipeline.config.out_dir = a.out;
  if (a.concurrency > 0) pipeline.config.concurrency = a.concurrency;
  if (a.strict) pipeline.config.strict_consensus = true;
  if (!pipeline.config.checkpoint_path.empty() &&
      !fs::path(pipeline.config.checkpoint_path).is_absolute())
    pipeline.config.checkpoint_path = a.out + "/" + pipeline.config.checkpoint_path;

  const std::array<AnnotatorClient*, 3> annotators = {
      pipeline.clients[0].get(), pipeline.clients[1].get(), pipeline.clients[2].get()};
  const PipelineReport report =
      run_pipeline(samples, annotators, *pipeline.clients[3], pipeline.config);

  write_manifest(a.out, "annotate", argv, {a.input, a.config},
                 {{"concurrency", pipeline.config.concurrency},
                  {"strict_consensus", pipeline.config.strict_consensus},
                  {"review_threshold", pipeline.config.review_threshold}});
  std::cout << "input " << report.input << ": annotated " << report.annotated << ", review "
            << report.review << ", dropped " << report.dropped << ", deferred "
            << report.deferred << "\n";
  return report.deferred == 0 ? 0 : 1;  // deferred samples need a rerun
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Open-world multi-target stance detection evaluator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a gold dataset");
  evaluate->add_option("--gold", ev.gold, "gold JSONL")->required();
  evaluate->add_option("--pred", ev.pred, "prediction JSONL")->required();
  evaluate->add_option("--out", ev.out, "output directory");
  evaluate->add_option("--config", ev.config, "evaluation config JSON (flags override it)");
  evaluate->add_option("--field-map", ev.field_map,
                       "gold schema mapping, e.g. text=content,stance.\u652f\u6301=support");
  evaluate->add_option("--weights", ev.weights, "alpha,beta,gamma")->delimiter(',');
  evaluate->add_option("--thresholds", ev.thresholds, "BS,BLEU,ROUGE,Recall,C gates")
      ->delimiter(',');
  evaluate->add_option("--tokenize", ev.tokenize_mode, "mixed|char");
  evaluate->add_option("--gate", ev.gate_mode, "pair|sample");
  evaluate->add_option("--avg", ev.avg, "macro|micro");
  evaluate->add_option("--match-floor", ev.match_floor, "minimum combined similarity to keep a match");
  evaluate->add_option("--embedder", ev.embedder, "onehot|remote");
  evaluate->add_option("--endpoint", ev.endpoint, "embedding service base URL");
  evaluate->add_option("--threads", ev.threads, "worker threads (0 = auto)");
  evaluate->add_flag("--flag-breakdown", ev.flag_breakdown, "explicit/implicit breakdown rows");
  evaluate->add_option("--subset", ev.subsets, "id-list file, repeatable")->take_all();

  CalibrateArgs ca;
  auto* calibrate = app.add_subcommand("calibrate", "Grid-search composite weights");
  calibrate->add_option("--scores", ca.scores, "scores.jsonl from evaluate")->required();
  calibrate->add_option("--judgments", ca.judgments, "human judgments JSONL")->required();
  calibrate->add_option("--step", ca.step, "simplex step");
  calibrate->add_option("--corr", ca.corr, "spearman|pearson");
  calibrate->add_option("--out", ca.out, "output directory");

  ThresholdsArgs th;
  auto* thresholds = app.add_subcommand("thresholds", "ROC / precision-recall threshold sweeps");
  thresholds->add_option("--scores", th.scores, "scores.jsonl from evaluate")->required();
  thresholds->add_option("--judgments", th.judgments, "human judgments JSONL")->required();
  thresholds->add_option("--select", th.select, "f1|youden");
  thresholds->add_option("--out", th.out, "output directory");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Stratified seeded subset draws");
  sample->add_option("--gold", sa.gold, "gold JSONL")->required();
  sample->add_option("--size", sa.size, "subset size");
  sample->add_option("--seeds", sa.seeds, "comma-separated seeds")->delimiter(',');
  sample->add_option("--strata", sa.strata, "bucket|bucket+stance");
  sample->add_option("--field-map", sa.field_map, "gold schema mapping");
  sample->add_option("--out", sa.out, "output directory");

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("--gold", st.gold, "gold JSONL")->required();
  stats->add_option("--top", st.top, "rows in the target frequency table");
  stats->add_option("--field-map", st.field_map, "gold schema mapping");
  stats->add_option("--out", st.out, "output directory");

  IaaArgs ia;
  auto* iaa = app.add_subcommand("iaa", "Inter-annotator agreement and adjudication");
  iaa->add_option("--ratings", ia.ratings, "ratings JSONL")->required();
  iaa->add_option("--bootstrap", ia.bootstrap, "bootstrap replicates");
  iaa->add_option("--level", ia.level, "CI level");
  iaa->add_option("--seed", ia.seed, "bootstrap seed");
  iaa->add_option("--out", ia.out, "output directory");

  AnnotateArgs an;
  auto* annotate = app.add_subcommand("annotate", "Run the multi-model annotation pipeline");
  annotate->add_option("--input", an.input, "samples JSONL")->required();
  annotate->add_option("--config", an.config, "pipeline config JSON")->required();
  annotate->add_option("--out", an.out, "output directory");
  annotate->add_option("--concurrency", an.concurrency, "in-flight samples");
  annotate->add_flag("--strict-consensus", an.strict, "drop any stance disagreement");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*evaluate) return cmd_evaluate(ev, args);
    if (*calibrate) return cmd_calibrate(ca, args);
    if (*thresholds) return cmd_thresholds(th, args);
    if (*sample) return cmd_sample(sa, args);
    if (*stats) return cmd_stats(st, args);
    if (*iaa) return cmd_iaa(ia, args);
    if (*annotate) return cmd_annotate(an, args);
  } catch (const Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace stanceval
