#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stanceval/types.hpp"

namespace stanceval {

struct GenRequest {
  std::string prompt;
  std::string sample_id;  // lets mock clients replay keyed fixtures
};

// Text-generation client. Throws Error("ClientUnavailable") when the backend
// cannot answer; the pipeline defers affected samples.
class AnnotatorClient {
 public:
  virtual ~AnnotatorClient() = default;
  virtual const std::string& name() const = 0;
  virtual std::string generate(const GenRequest& request) = 0;
};

// Replays fixture files <dir>/<name>/<sample_id>.txt; a missing file means
// outage for that sample.
class MockClient final : public AnnotatorClient {
 public:
  MockClient(std::string name, std::string fixtures_dir);
  const std::string& name() const override { return name_; }
  std::string generate(const GenRequest& request) override;

 private:
  std::string name_;
  std::string fixtures_dir_;
};

// In-memory variant keyed by sample id; missing key = outage.
class MapClient final : public AnnotatorClient {
 public:
  MapClient(std::string name, std::map<std::string, std::string> replies);
  const std::string& name() const override { return name_; }
  std::string generate(const GenRequest& request) override;

 private:
  std::string name_;
  std::map<std::string, std::string> replies_;
};

// POST {endpoint}/generate, request {"prompt": string}, response
// {"text": string}. Retries with exponential backoff before reporting outage.
class RemoteClient final : public AnnotatorClient {
 public:
  struct Options {
    int timeout_seconds = 60;
    int max_attempts = 3;
    int backoff_ms = 200;
  };
  RemoteClient(std::string name, std::string endpoint) : RemoteClient(name, endpoint, Options()) {}
  RemoteClient(std::string name, std::string endpoint, Options options);
  const std::string& name() const override { return name_; }
  std::string generate(const GenRequest& request) override;

 private:
  std::string name_;
  std::string endpoint_;
  Options options_;
};

struct ParsedAnnotation {
  std::vector<TargetStancePair> pairs;  // targets normalized, first occurrence kept
  std::optional<std::string> parse_error;
};

// Primary path: an embedded JSON array of {target, stance} objects (keys also
// accepted in Chinese). Fallback: "目标/target: X ... 立场/stance: Y" line
// patterns. Stance synonyms 支持/反对/中立 map onto the label set. Anything
// unparseable yields an empty list plus a recorded error.
ParsedAnnotation parse_annotation(std::string_view raw);

enum class ConsensusStatus { valid, invalid };

struct ConsensusPair {
  TargetStancePair pair;
  std::vector<std::string> supporters;  // model names, >= 2
};

struct ConsensusResult {
  std::string id;
  ConsensusStatus status = ConsensusStatus::invalid;
  std::vector<ConsensusPair> pairs;
  std::vector<std::string> dissent_log;
};

// 2-of-3 cross-validation: a target emitted by >= 2 models with a majority
// stance becomes a consensus pair; a target shared by >= 2 models whose
// stances split without majority invalidates the sample. In strict mode any
// stance disagreement on a shared target invalidates. Valid = at least one
// consensus pair and no conflicted target.
ConsensusResult consensus(const std::string& sample_id,
                          const std::array<std::pair<std::string, std::vector<TargetStancePair>>,
                                           3>& model_outputs,
                          bool strict = false);

struct QualityVerdict {
  std::string id;
  std::optional<double> score;  // 0-10 scale
  bool flagged = false;
  std::optional<std::string> revision;
  std::string reason;  // "low_score" | "parse_failure" | ""
};

// Prompts the scorer with the sample text and consensus pairs, extracts the
// first in-range number from the reply. flagged <=> score missing or below
// the review threshold; flagged verdicts carry the scorer's trailing remark
// as the suggested revision.
QualityVerdict quality_gate(const std::string& sample_id, const std::string& text,
                            const std::vector<ConsensusPair>& pairs, AnnotatorClient& scorer,
                            double review_threshold, const std::string& prompt_template);

struct PipelineConfig {
  std::string annotation_template = "{text}";  // {text} placeholder
  std::string scorer_template = "{text}\n{pairs}";  // {text} and {pairs}
  double review_threshold = 7.0;
  int concurrency = 4;
  bool strict_consensus = false;
  int max_attempts = 3;
  int backoff_ms = 100;
  std::string checkpoint_path;  // empty = no checkpointing
  std::string out_dir = ".";
};

struct PipelineReport {
  std::int64_t input = 0;
  std::int64_t annotated = 0;
  std::int64_t review = 0;
  std::int64_t dropped = 0;
  std::int64_t deferred = 0;
  std::int64_t parse_failures = 0;    // individual model outputs that failed to parse
  std::int64_t consensus_valid = 0;
  std::int64_t consensus_invalid = 0;
  std::int64_t scorer_flagged = 0;

  nlohmann::json to_json() const;
};

// Runs annotate -> cross-validate -> score -> route for every sample.
// Every input lands in exactly one of {annotated, review, dropped, deferred}.
// Writes annotated.jsonl, review.jsonl, dropped.jsonl and report.json under
// cfg.out_dir; with a checkpoint path, finished samples are reused on rerun
// and the outputs are rebuilt byte-identically in input order.
PipelineReport run_pipeline(const std::vector<Sample>& samples,
                            const std::array<AnnotatorClient*, 3>& annotators,
                            AnnotatorClient& scorer, const PipelineConfig& cfg);

// Pipeline configuration file (JSON). Keys: annotators (array of three
// {name, endpoint|fixtures}), scorer ({name, endpoint|fixtures}),
// annotation_template, scorer_template, review_threshold, concurrency,
// strict_consensus, checkpoint.
struct LoadedPipeline {
  std::vector<std::unique_ptr<AnnotatorClient>> clients;  // 3 annotators + scorer
  PipelineConfig config;
};
LoadedPipeline load_pipeline_config(const std::string& path);

}  // namespace stanceval
