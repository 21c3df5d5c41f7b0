#include "stanceval/cli.hpp"

#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "stanceval/dataset.hpp"
#include "stanceval/embedding.hpp"
#include "stanceval/report.hpp"
#include "stanceval/rng.hpp"
#include "stanceval/target_eval.hpp"
#include "temp_dir.hpp"

using namespace stanceval;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

std::string gold_fixture() {
  return
      R"({"id":"a","text":"华为手机很好","pairs":[{"target":"华为","stance":"support"}]})" "\n"
      R"({"id":"b","text":"美国和俄罗斯","pairs":[{"target":"美国","stance":"against"},{"target":"俄罗斯","stance":"neutral"}]})"
      "\n"
      R"({"id":"c","text":"苹果 特斯拉 小米 比亚迪","pairs":[{"target":"苹果","stance":"neutral"},{"target":"特斯拉","stance":"support"},{"target":"小米","stance":"support"},{"target":"比亚迪","stance":"against"}]})"
      "\n";
}

std::string perfect_pred_fixture() {
  return
      R"({"id":"a","pairs":[{"target":"华为","stance":"support"}]})" "\n"
      R"({"id":"b","pairs":[{"target":"美国","stance":"against"},{"target":"俄罗斯","stance":"neutral"}]})"
      "\n"
      R"({"id":"c","pairs":[{"target":"苹果","stance":"neutral"},{"target":"特斯拉","stance":"support"},{"target":"小米","stance":"support"},{"target":"比亚迪","stance":"against"}]})"
      "\n";
}

}  // namespace

TEST_CASE("evaluate on a perfect prediction prints 100.00 everywhere") {
  TempDir tmp;
  const auto gold = tmp.file("gold.jsonl", gold_fixture());
  const auto pred = tmp.file("pred.jsonl", perfect_pred_fixture());
  const auto out = tmp.sub("out");
  const int rc = cli_main({"evaluate", "--gold", gold, "--pred", pred, "--out", out});
  CHECK(rc == 0);

  const auto report = read_file(out + "/report.csv");
  CHECK(report.find("all,3,100.00,100.00,100.00,100.00,100.00") != std::string::npos);
  const auto stance = read_file(out + "/stance.csv");
  CHECK(stance.find("macro,100.00,100.00,100.00,7") != std::string::npos);
  CHECK(fs::exists(out + "/scores.jsonl"));
  CHECK(fs::exists(out + "/manifest.json"));
  CHECK(fs::exists(out + "/confusion.csv"));

  const auto manifest = nlohmann::json::parse(read_file(out + "/manifest.json"));
  CHECK(manifest["command"] == "evaluate");
  CHECK(manifest["config"]["alpha"] == 0.6);
  CHECK(manifest.contains("config_hash"));
}

TEST_CASE("evaluate with empty predictions reports zero recall") {
  TempDir tmp;
  const auto gold = tmp.file("gold.jsonl", gold_fixture());
  const auto pred = tmp.file("pred.jsonl",
                             R"({"id":"a","pairs":[]})" "\n"
                             R"({"id":"b","pairs":[]})" "\n"
                             R"({"id":"c","pairs":[]})" "\n");
  const auto out = tmp.sub("out");
  const int rc = cli_main({"evaluate", "--gold", gold, "--pred", pred, "--out", out});
  CHECK(rc == 0);
  const auto report = read_file(out + "/report.csv");
  CHECK(report.find("all,3,0.00,0.00,0.00,0.00,0.00") != std::string::npos);
  const auto text = read_file(out + "/report.txt");
  CHECK(text.find("stance detection skipped") != std::string::npos);
}

TEST_CASE("evaluate agrees with direct library calls on a mixed fixture") {
  TempDir tmp;
  const auto gold = tmp.file("gold.jsonl", gold_fixture());
  const auto pred = tmp.file(
      "pred.jsonl",
      R"({"id":"a","pairs":[{"target":"华为手机","stance":"support"}]})" "\n"
      R"({"id":"b","pairs":[{"target":"美国","stance":"support"}]})" "\n"
      R"({"id":"c","pairs":[{"target":"苹果","stance":"neutral"},{"target":"特斯拉汽车","stance":"support"},{"target":"小米","stance":"against"},{"target":"比亚迪","stance":"against"},{"target":"多余目标","stance":"neutral"}]})"
      "\n");
  const auto out = tmp.sub("out");
  REQUIRE(cli_main({"evaluate", "--gold", gold, "--pred", pred, "--out", out}) == 0);

  OneHotEmbedder embedder;
  EvalConfig cfg;
  const auto samples = load_dataset(gold);
  const auto predictions = load_predictions(pred);
  const auto scores = score_corpus_serial(samples, predictions, cfg, embedder);
  const auto expect = corpus_target_report(scores);

  const auto csv = read_file(out + "/report.csv");
  const std::string want_row = "all," + std::to_string(expect.overall.samples) + "," +
                               format_pct(expect.overall.means.bertscore) + "," +
                               format_pct(expect.overall.means.bleu) + "," +
                               format_pct(expect.overall.means.rouge_l) + "," +
                               format_pct(expect.overall.recall) + "," +
                               format_pct(expect.overall.c_score);
  CHECK(csv.find(want_row) != std::string::npos);
}

TEST_CASE("evaluate exits 2 on missing inputs and bad flags") {
  TempDir tmp;
  const auto gold = tmp.file("gold.jsonl", gold_fixture());
  CHECK(cli_main({"evaluate", "--gold", gold, "--pred", (tmp.path / "nope.jsonl").string(),
                  "--out", tmp.sub("o1")}) == 2);
  CHECK(cli_main({"evaluate", "--gold", gold}) == 2);  // missing required --pred
  CHECK(cli_main({"bogus-subcommand"}) == 2);
  CHECK(cli_main({"evaluate", "--gold", gold, "--pred", gold, "--out", tmp.sub("o2"),
                  "--weights", "0.5,0.5"}) == 2);  // needs three weights
  CHECK(cli_main({"evaluate", "--gold", gold, "--pred", gold, "--out", tmp.sub("o3"),
                  "--gate", "nonsense"}) == 2);
}

TEST_CASE("evaluate reads a config file and lets flags override it") {
  TempDir tmp;
  const auto gold = tmp.file("gold.jsonl", gold_fixture());
  const auto pred = tmp.file("pred.jsonl", perfect_pred_fixture());
  const auto cfg = tmp.file("config.json",
                            R"({"alpha":0.5,"beta":0.25,"gamma":0.25,"gate":"sample"})");
  const auto out = tmp.sub("out");
  REQUIRE(cli_main({"evaluate", "--gold", gold, "--pred", pred, "--out", out, "--config", cfg,
                    "--gate", "pair"}) == 0);
  const auto manifest = nlohmann::json::parse(read_file(out + "/manifest.json"));
  CHECK(manifest["config"]["alpha"] == 0.5);   // from the file
  CHECK(manifest["config"]["gate"] == "pair");  // flag wins over the file
}

TEST_CASE("sample subcommand writes one id list per default seed plus a manifest") {
  TempDir tmp;
  std::string gold;
  for (int i = 0; i < 60; ++i) {
    gold += R"({"id":"s)" + std::to_string(100 + i) +
            R"(","text":"x","pairs":[{"target":"t","stance":"support"}]})" "\n";
  }
  const auto gold_path = tmp.file("gold.jsonl", gold);
  const auto out = tmp.sub("draws");
  REQUIRE(cli_main({"sample", "--gold", gold_path, "--size", "10", "--out", out}) == 0);

  const std::uint64_t default_seeds[] = {13, 97, 233, 521, 907, 2029, 4099};
  for (const auto seed : default_seeds)
    CHECK(fs::exists(out + "/subset_seed" + std::to_string(seed) + ".txt"));
  const auto manifest = nlohmann::json::parse(read_file(out + "/manifest.json"));
  CHECK(manifest["config"]["draws"].size() == 7);

  // rerun into a second directory: byte-identical draws
  const auto out2 = tmp.sub("draws2");
  REQUIRE(cli_main({"sample", "--gold", gold_path, "--size", "10", "--out", out2}) == 0);
  CHECK(read_file(out + "/subset_seed13.txt") == read_file(out2 + "/subset_seed13.txt"));
}

TEST_CASE("stats subcommand emits the distribution tables") {
  TempDir tmp;
  const auto gold = tmp.file("gold.jsonl", gold_fixture());
  const auto out = tmp.sub("stats");
  REQUIRE(cli_main({"stats", "--gold", gold, "--out", out}) == 0);
  const auto dist = read_file(out + "/distribution.csv");
  CHECK(dist.find("Single,1,1,0,0") != std::string::npos);
  CHECK(dist.find("Dual,1,0,1,1") != std::string::npos);
  CHECK(dist.find("Multi,1,2,1,1") != std::string::npos);
  CHECK(dist.find("Total,3,3,2,2") != std::string::npos);
  const auto top = read_file(out + "/top_targets.csv");
  CHECK(top.find("华为,1,1,0,0") != std::string::npos);
}

TEST_CASE("thresholds subcommand separates synthetic data with AUC 1") {
  TempDir tmp;
  // scores: gate-correct samples high, incorrect low, perfectly separated
  std::string scores, judgments;
  for (int i = 0; i < 20; ++i) {
    const bool good = i < 10;
    const double v = good ? 0.8 + 0.01 * i : 0.2 + 0.01 * i;
    const std::string id = "s" + std::to_string(i);
    scores += nlohmann::json{{"id", id},       {"bertscore", v},   {"bleu", v},
                             {"rouge_l", v},   {"recall", v},      {"c_score", v},
                             {"gate", good},   {"pred_count", 1},  {"gold_count", 1},
                             {"missing", false}, {"pairs", nlohmann::json::array()}}
                  .dump() +
              "\n";
    judgments += nlohmann::json{{"id", id}, {"correct", good}}.dump() + "\n";
  }
  const auto scores_path = tmp.file("scores.jsonl", scores);
  const auto judgments_path = tmp.file("judgments.jsonl", judgments);
  const auto out = tmp.sub("thresholds");
  REQUIRE(cli_main({"thresholds", "--scores", scores_path, "--judgments", judgments_path,
                    "--out", out}) == 0);
  const auto summary = nlohmann::json::parse(read_file(out + "/thresholds.json"));
  CHECK(summary["gate_agreement"] == 1.0);
  for (const auto& metric : summary["metrics"]) {
    CHECK(metric["auc_roc"] == 1.0);
    CHECK(fs::exists(out + "/" + metric["metric"].get<std::string>() + "_curve.csv"));
  }
  // reference defaults recorded next to the sweep results
  CHECK(summary["metrics"][0]["reference_default"] == 0.7);
  CHECK(summary["metrics"][4]["reference_default"] == 0.3);
}

TEST_CASE("calibrate subcommand recovers planted weights through the file interface") {
  TempDir tmp;
  std::string scores, judgments;
  SplitMix64 rng(771);
  for (int i = 0; i < 50; ++i) {
    const std::string id = "s" + std::to_string(i);
    const double bs = rng.next_double(), bl = rng.next_double(), rg = rng.next_double();
    scores += nlohmann::json{{"id", id},       {"bertscore", bs},  {"bleu", bl},
                             {"rouge_l", rg},  {"recall", 1.0},    {"c_score", 0.0},
                             {"gate", false},  {"pred_count", 1},  {"gold_count", 1},
                             {"missing", false}, {"pairs", nlohmann::json::array()}}
                  .dump() +
              "\n";
    judgments +=
        nlohmann::json{{"id", id}, {"quality", 0.6 * bs + 0.2 * bl + 0.2 * rg}}.dump() + "\n";
  }
  const auto scores_path = tmp.file("scores.jsonl", scores);
  const auto judgments_path = tmp.file("judgments.jsonl", judgments);
  const auto out = tmp.sub("calibrate");
  REQUIRE(cli_main({"calibrate", "--scores", scores_path, "--judgments", judgments_path,
                    "--out", out}) == 0);
  const auto result = nlohmann::json::parse(read_file(out + "/calibration.json"));
  CHECK(result["alpha"] == 0.6);
  CHECK(result["beta"] == 0.2);
  CHECK(result["gamma"] == 0.2);
}

TEST_CASE("annotate subcommand drives the pipeline from a config file") {
  TempDir tmp;
  const auto gold = tmp.file("gold.jsonl", gold_fixture());
  // fixtures for three mock annotators and the scorer
  for (const char* model : {"A", "B", "C"}) {
    fs::create_directories(tmp.path / "fx" / model);
    for (const char* id : {"a", "b", "c"})
      tmp.file(std::string("fx/") + model + "/" + id + ".txt",
               R"([{"target":"华为","stance":"support"}])");
  }
  fs::create_directories(tmp.path / "fx" / "S");
  tmp.file("fx/S/a.txt", "score: 9");
  tmp.file("fx/S/b.txt", "score: 3, 需要人工复核");
  tmp.file("fx/S/c.txt", "score: 8");

  const auto cfg = tmp.file("pipeline.json", nlohmann::json{
      {"annotators", {{{"name", "A"}, {"fixtures", (tmp.path / "fx").string()}},
                      {{"name", "B"}, {"fixtures", (tmp.path / "fx").string()}},
                      {{"name", "C"}, {"fixtures", (tmp.path / "fx").string()}}}},
      {"scorer", {{"name", "S"}, {"fixtures", (tmp.path / "fx").string()}}},
      {"review_threshold", 7},
      {"max_attempts", 1},
      {"backoff_ms", 1}}.dump());

  const auto out = tmp.sub("annotate");
  REQUIRE(cli_main({"annotate", "--input", gold, "--config", cfg, "--out", out}) == 0);
  const auto report = nlohmann::json::parse(read_file(out + "/report.json"));
  CHECK(report["input"] == 3);
  CHECK(report["annotated"] == 2);
  CHECK(report["review"] == 1);
  CHECK(report["dropped"] == 0);
  const auto review = read_file(out + "/review.jsonl");
  CHECK(review.find("需要人工复核") != std::string::npos);
}
