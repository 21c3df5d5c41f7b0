#include "stanceval/annotation.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "httplib.h"
#include "stanceval/dataset.hpp"
#include "stanceval/error.hpp"
#include "stanceval/report.hpp"
#include "stanceval/text_norm.hpp"

namespace stanceval {

MockClient::MockClient(std::string name, std::string fixtures_dir)
    : name_(std::move(name)), fixtures_dir_(std::move(fixtures_dir)) {}

std::string MockClient::generate(const GenRequest& request) {
  const std::string path = fixtures_dir_ + "/" + name_ + "/" + request.sample_id + ".txt";
  std::ifstream in(path);
  if (!in)
    throw Error("ClientUnavailable", "no fixture reply for (" + name_ + ", " +
                                         request.sample_id + ")");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

MapClient::MapClient(std::string name, std::map<std::string, std::string> replies)
    : name_(std::move(name)), replies_(std::move(replies)) {}

std::string MapClient::generate(const GenRequest& request) {
  const auto it = replies_.find(request.sample_id);
  if (it == replies_.end())
    throw Error("ClientUnavailable", "no reply for (" + name_ + ", " + request.sample_id + ")");
  return it->second;
}

RemoteClient::RemoteClient(std::string name, std::string endpoint, Options options)
    : name_(std::move(name)), endpoint_(std::move(endpoint)), options_(options) {}

std::string RemoteClient::generate(const GenRequest& request) {
  const std::string payload = nlohmann::json{{"prompt", request.prompt}}.dump();
  std::string last_error;
  for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(options_.backoff_ms << (attempt - 1)));
    httplib::Client cli(endpoint_);
    cli.set_connection_timeout(options_.timeout_seconds);
    cli.set_read_timeout(options_.timeout_seconds);
    auto res = cli.Post("/generate", payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("text") || !reply["text"].is_string()) {
      last_error = "malformed generate response";
      continue;
    }
    return reply["text"].get<std::string>();
  }
  throw Error("ClientUnavailable",
              name_ + " (" + endpoint_ + ") failed after " +
                  std::to_string(options_.max_attempts) + " attempts: " + last_error);
}

namespace {

std::optional<Stance> stance_from_synonym(std::string_view raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "support" || s == "支持") return Stance::support;
  if (s == "against" || s == "反对") return Stance::against;
  if (s == "neutral" || s == "中立") return Stance::neutral;
  return std::nullopt;
}

void push_pair(std::vector<TargetStancePair>& pairs, std::set<std::string>& seen,
               const std::string& raw_target, Stance stance) {
  const std::string target = normalize_text(raw_target);
  if (target.empty()) return;
  if (seen.insert(target).second) pairs.push_back({target, stance});
}

// Balanced-bracket scan that respects JSON string literals.
std::optional<std::string> balanced_array(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\')
        ++i;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '[') ++depth;
    else if (c == ']' && --depth == 0) return std::string(text.substr(start, i - start + 1));
  }
  return std::nullopt;
}

bool try_parse_json_array(std::string_view raw, std::vector<TargetStancePair>& pairs,
                          std::set<std::string>& seen, bool& had_invalid_entries) {
  std::size_t pos = raw.find('[');
  int attempts = 0;
  while (pos != std::string_view::npos && attempts < 8) {
    ++attempts;
    const auto chunk = balanced_array(raw, pos);
    if (chunk) {
      nlohmann::json arr = nlohmann::json::parse(*chunk, nullptr, false);
      if (!arr.is_discarded() && arr.is_array()) {
        bool any_object = false;
        for (const auto& el : arr) {
          if (!el.is_object()) continue;
          any_object = true;
          std::string target;
          if (el.contains("target") && el["target"].is_string())
            target = el["target"].get<std::string>();
          else if (el.contains("目标") && el["目标"].is_string())
            target = el["目标"].get<std::string>();
          std::optional<Stance> stance;
          if (el.contains("stance") && el["stance"].is_string())
            stance = stance_from_synonym(el["stance"].get<std::string>());
          else if (el.contains("立场") && el["立场"].is_string())
            stance = stance_from_synonym(el["立场"].get<std::string>());
          if (!target.empty() && stance)
            push_pair(pairs, seen, target, *stance);
          else
            had_invalid_entries = true;
        }
        if (arr.empty() || any_object) return true;  // an explicit [] is a valid "no targets"
      }
    }
    pos = raw.find('[', pos + 1);
  }
  return false;
}

bool keyword_at(const std::vector<char32_t>& cps, std::size_t i, std::u32string_view kw) {
  if (i + kw.size() > cps.size()) return false;
  for (std::size_t k = 0; k < kw.size(); ++k) {
    char32_t c = cps[i + k];
    char32_t w = kw[k];
    if (c < 0x80 && std::isupper(static_cast<int>(c))) c += 32;
    if (c != w) return false;
  }
  return true;
}

bool is_delim(char32_t c) {
  return c == U',' || c == U'，' || c == U';' || c == U'；' || c == U'。' || c == U'\n' ||
         c == U'\r' || c == U'|';
}

constexpr std::u32string_view kTargetKw1 = U"目标";
constexpr std::u32string_view kTargetKw2 = U"target";
constexpr std::u32string_view kStanceKw1 = U"立场";
constexpr std::u32string_view kStanceKw2 = U"stance";

// Fallback for free-form replies: "目标/target: X ... 立场/stance: Y".
void parse_line_patterns(std::string_view raw, std::vector<TargetStancePair>& pairs,
                         std::set<std::string>& seen) {
  const std::vector<char32_t> cps = decode_utf8(raw);
  auto skip_spaces = [&](std::size_t i) {
    while (i < cps.size() && (cps[i] == U' ' || cps[i] == U'\t' || cps[i] == 0x3000)) ++i;
    return i;
  };
  auto expect_colon = [&](std::size_t i) -> std::optional<std::size_t> {
    i = skip_spaces(i);
    if (i < cps.size() && (cps[i] == U':' || cps[i] == U'：')) return skip_spaces(i + 1);
    return std::nullopt;
  };
  auto stance_kw_at = [&](std::size_t i) {
    return keyword_at(cps, i, kStanceKw1) || keyword_at(cps, i, kStanceKw2);
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    std::size_t kw_len = 0;
    if (keyword_at(cps, i, kTargetKw1))
      kw_len = kTargetKw1.size();
    else if (keyword_at(cps, i, kTargetKw2))
      kw_len = kTargetKw2.size();
    if (kw_len == 0) {
      ++i;
      continue;
    }
    const auto after_colon = expect_colon(i + kw_len);
    if (!after_colon) {
      i += kw_len;
      continue;
    }
    // capture the target up to a delimiter or the stance keyword
    std::size_t j = *after_colon;
    std::size_t end = j;
    while (end < cps.size() && !is_delim(cps[end]) && !stance_kw_at(end)) ++end;
    std::size_t target_end = end;
    while (target_end > j && (cps[target_end - 1] == U' ' || cps[target_end - 1] == 0x3000))
      --target_end;
    if (target_end == j) {
      i = end;
      continue;
    }
    std::vector<char32_t> target_cps(cps.begin() + static_cast<long>(j),
                                     cps.begin() + static_cast<long>(target_end));

    // find the stance keyword next
    std::size_t k = end;
    while (k < cps.size() && (is_delim(cps[k]) || cps[k] == U' ' || cps[k] == 0x3000)) ++k;
    if (!stance_kw_at(k)) {
      i = end;
      continue;
    }
    const std::size_t stance_kw_len =
        keyword_at(cps, k, kStanceKw1) ? kStanceKw1.size() : kStanceKw2.size();
    const auto stance_start = expect_colon(k + stance_kw_len);
    if (!stance_start) {
      i = k + stance_kw_len;
      continue;
    }
    std::size_t s_end = *stance_start;
    while (s_end < cps.size() && !is_delim(cps[s_end]) && cps[s_end] != U' ' &&
           cps[s_end] != 0x3000)
      ++s_end;
    std::vector<char32_t> stance_cps(cps.begin() + static_cast<long>(*stance_start),
                                     cps.begin() + static_cast<long>(s_end));
    const auto stance = stance_from_synonym(encode_utf8(stance_cps));
    if (stance) push_pair(pairs, seen, encode_utf8(target_cps), *stance);
    i = s_end;
  }
}

}  // namespace

ParsedAnnotation parse_annotation(std::string_view raw) {
  ParsedAnnotation out;
  std::set<std::string> seen;
  bool had_invalid_entries = false;
  if (try_parse_json_array(raw, out.pairs, seen, had_invalid_entries)) {
    if (out.pairs.empty() && had_invalid_entries)
      out.parse_error = "JSON array present but no valid target/stance objects";
    return out;
  }
  parse_line_patterns(raw, out.pairs, seen);
  if (out.pairs.empty()) out.parse_error = "no target-stance pairs recognized";
  return out;
}

ConsensusResult consensus(
    const std::string& sample_id,
    const std::array<std::pair<std::string, std::vector<TargetStancePair>>, 3>& model_outputs,
    bool strict) {
  ConsensusResult result;
  result.id = sample_id;

  // target -> (model index, stance), one vote per model
  std::map<std::string, std::vector<std::pair<int, Stance>>> votes;
  for (int m = 0; m < 3; ++m) {
    std::set<std::string> seen;
    for (const auto& p : model_outputs[static_cast<std::size_t>(m)].second)
      if (seen.insert(p.target).second) votes[p.target].emplace_back(m, p.stance);
  }

  bool conflict = false;
  for (const auto& [target, stances] : votes) {
    if (stances.size() < 2) continue;  // mentioned by one model only: ignored
    std::array<int, 3> tally = {0, 0, 0};
    for (const auto& [_, s] : stances) ++tally[static_cast<std::size_t>(s)];
    int majority = -1;
    for (int s = 0; s < 3; ++s)
      if (tally[static_cast<std::size_t>(s)] >= 2) majority = s;

    if (majority < 0) {
      // 1-1 split or three-way disagreement: no stance consensus
      conflict = true;
      std::string entry = target + ": no stance majority (";
      for (std::size_t k = 0; k < stances.size(); ++k) {
        if (k) entry += ", ";
        entry += model_outputs[static_cast<std::size_t>(stances[k].first)].first;
        entry += "=";
        entry += to_string(stances[k].second);
      }
      entry += ")";
      result.dissent_log.push_back(std::move(entry));
      continue;
    }

    ConsensusPair cp;
    cp.pair = {target, static_cast<Stance>(majority)};
    bool dissent = false;
    for (const auto& [m, s] : stances) {
      if (static_cast<int>(s) == majority)
        cp.supporters.push_back(model_outputs[static_cast<std::size_t>(m)].first);
      else
        dissent = true;
    }
    if (dissent) {
      std::string entry = target + ": stance dissent (majority " +
                          std::string(to_string(static_cast<Stance>(majority))) + ")";
      result.dissent_log.push_back(std::move(entry));
      if (strict) {
        conflict = true;
        continue;
      }
    }
    result.pairs.push_back(std::move(cp));
  }

  result.status = (!result.pairs.empty() && !conflict) ? ConsensusStatus::valid
                                                       : ConsensusStatus::invalid;
  if (result.status == ConsensusStatus::invalid) result.pairs.clear();
  return result;
}

namespace {

std::string replace_all(std::string text, std::string_view what, std::string_view with) {
  std::size_t pos = 0;
  while ((pos = text.find(what, pos)) != std::string::npos) {
    text.replace(pos, what.size(), with);
    pos += with.size();
  }
  return text;
}

nlohmann::json consensus_pairs_json(const std::vector<ConsensusPair>& pairs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& cp : pairs)
    arr.push_back({{"target", cp.pair.target},
                   {"stance", std::string(to_string(cp.pair.stance))},
                   {"supporters", cp.supporters}});
  return arr;
}

// First number in the reply that lies on the 0-10 scale.
std::optional<std::pair<double, std::size_t>> extract_score(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size()) {
    if (std::isdigit(static_cast<unsigned char>(reply[i]))) {
      std::size_t j = i;
      while (j < reply.size() && std::isdigit(static_cast<unsigned char>(reply[j]))) ++j;
      if (j < reply.size() && reply[j] == '.') {
        std::size_t k = j + 1;
        while (k < reply.size() && std::isdigit(static_cast<unsigned char>(reply[k]))) ++k;
        if (k > j + 1) j = k;
      }
      const double value = std::stod(std::string(reply.substr(i, j - i)));
      if (value >= 0.0 && value <= 10.0) return std::make_pair(value, j);
      i = j;
    } else {
      ++i;
    }
  }
  return std::nullopt;
}

}  // namespace

QualityVerdict quality_gate(const std::string& sample_id, const std::string& text,
                            const std::vector<ConsensusPair>& pairs, AnnotatorClient& scorer,
                            double review_threshold, const std::string& prompt_template) {
  std::string prompt = replace_all(prompt_template, "{text}", text);
  prompt = replace_all(prompt, "{pairs}", consensus_pairs_json(pairs).dump());
  const std::string reply = scorer.generate({prompt, sample_id});

  QualityVerdict verdict;
  verdict.id = sample_id;
  const auto extracted = extract_score(reply);
  if (!extracted) {
    verdict.flagged = true;
    verdict.reason = "parse_failure";
    return verdict;
  }
  verdict.score = extracted->first;
  verdict.flagged = *verdict.score < review_threshold;
  if (verdict.flagged) {
    verdict.reason = "low_score";
    std::string_view rest = std::string_view(reply).substr(extracted->second);
    std::size_t b = 0;
    // "4/10" style: strip the scale suffix before the remark
    if (b + 1 < rest.size() && rest[b] == '/' &&
        std::isdigit(static_cast<unsigned char>(rest[b + 1]))) {
      b += 1;
      while (b < rest.size() && std::isdigit(static_cast<unsigned char>(rest[b]))) ++b;
    }
    while (b < rest.size() &&
           (std::isspace(static_cast<unsigned char>(rest[b])) || rest[b] == ',' ||
            rest[b] == '.' || rest[b] == ':' || rest[b] == ';' || rest[b] == '-'))
      ++b;
    std::string remark(rest.substr(b));
    while (!remark.empty() && std::isspace(static_cast<unsigned char>(remark.back())))
      remark.pop_back();
    if (!remark.empty()) verdict.revision = remark;
  }
  return verdict;
}

namespace {

struct Outcome {
  std::string id;
  std::string status;  // annotated | review | dropped | deferred
  nlohmann::json payload;
  bool consensus_checked = false;
  bool consensus_valid = false;
  int parse_failures = 0;
};

std::string call_with_retries(AnnotatorClient& client, const GenRequest& request,
                              int max_attempts, int backoff_ms) {
  std::string last;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms << (attempt - 1)));
    try {
      return client.generate(request);
    } catch (const Error& e) {
      last = e.what();
    }
  }
  throw Error("ClientUnavailable", client.name() + ": " + last);
}

Outcome process_sample(const Sample& sample, const std::array<AnnotatorClient*, 3>& annotators,
                       AnnotatorClient& scorer, const PipelineConfig& cfg) {
  Outcome outcome;
  outcome.id = sample.id;
  const std::string prompt = replace_all(cfg.annotation_template, "{text}", sample.text);

  std::array<std::pair<std::string, std::vector<TargetStancePair>>, 3> outputs;
  for (int m = 0; m < 3; ++m) {
    auto& client = *annotators[static_cast<std::size_t>(m)];
    std::string reply;
    try {
      reply = call_with_retries(client, {prompt, sample.id}, cfg.max_attempts, cfg.backoff_ms);
    } catch (const Error& e) {
      outcome.status = "deferred";
      outcome.payload = {{"reason", "annotator_unavailable"}, {"detail", e.what()}};
      return outcome;
    }
    ParsedAnnotation parsed = parse_annotation(reply);
    if (parsed.parse_error) ++outcome.parse_failures;
    outputs[static_cast<std::size_t>(m)] = {client.name(), std::move(parsed.pairs)};
  }

  const ConsensusResult cons = consensus(sample.id, outputs, cfg.strict_consensus);
  outcome.consensus_checked = true;
  outcome.consensus_valid = cons.status == ConsensusStatus::valid;
  if (cons.status == ConsensusStatus::invalid) {
    outcome.status = "dropped";
    outcome.payload = {{"reason", "consensus_invalid"}, {"dissent", cons.dissent_log}};
    return outcome;
  }

  QualityVerdict verdict;
  try {
    verdict = quality_gate(sample.id, sample.text, cons.pairs, scorer, cfg.review_threshold,
                           cfg.scorer_template);
  } catch (const Error& e) {
    outcome.status = "deferred";
    outcome.payload = {{"reason", "scorer_unavailable"}, {"detail", e.what()}};
    return outcome;
  }

  nlohmann::json record = {{"id", sample.id},
                           {"text", sample.text},
                           {"pairs", consensus_pairs_json(cons.pairs)}};
  if (!cons.dissent_log.empty()) record["dissent"] = cons.dissent_log;
  if (verdict.flagged) {
    record["score"] = verdict.score ? nlohmann::json(*verdict.score) : nlohmann::json(nullptr);
    record["reason"] = verdict.reason;
    if (verdict.revision) record["revision"] = *verdict.revision;
    outcome.status = "review";
  } else {
    record["score"] = *verdict.score;
    outcome.status = "annotated";
  }
  outcome.payload = std::move(record);
  return outcome;
}

}  // namespace

nlohmann::json PipelineReport::to_json() const {
  return {{"input", input},
          {"annotated", annotated},
          {"review", review},
          {"dropped", dropped},
          {"deferred", deferred},
          {"parse_failures", parse_failures},
          {"consensus_valid", consensus_valid},
          {"consensus_invalid", consensus_invalid},
          {"scorer_flagged", scorer_flagged}};
}

PipelineReport run_pipeline(const std::vector<Sample>& samples,
                            const std::array<AnnotatorClient*, 3>& annotators,
                            AnnotatorClient& scorer, const PipelineConfig& cfg) {
  // Reusable results from a previous partial run; deferred samples retry.
  std::map<std::string, Outcome> done;
  if (!cfg.checkpoint_path.empty()) {
    std::ifstream in(cfg.checkpoint_path);
    if (in) {
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded()) continue;
        Outcome o;
        o.id = obj.value("id", "");
        o.status = obj.value("status", "");
        o.payload = obj.value("payload", nlohmann::json());
        o.consensus_checked = obj.value("consensus_checked", false);
        o.consensus_valid = obj.value("consensus_valid", false);
        o.parse_failures = obj.value("parse_failures", 0);
        if (!o.id.empty() && o.status != "deferred") done[o.id] = std::move(o);
      }
    }
  }

  std::vector<Outcome> outcomes(samples.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto it = done.find(samples[i].id);
    if (it != done.end())
      outcomes[i] = it->second;
    else
      pending.push_back(i);
  }

  const long n_pending = static_cast<long>(pending.size());
  const int threads = std::max(1, cfg.concurrency);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long k = 0; k < n_pending; ++k) {
    const std::size_t i = pending[static_cast<std::size_t>(k)];
    outcomes[i] = process_sample(samples[i], annotators, scorer, cfg);
  }

  PipelineReport report;
  report.input = static_cast<std::int64_t>(samples.size());
  std::string annotated_out, review_out, dropped_out, checkpoint_out;
  for (const auto& o : outcomes) {
    report.parse_failures += o.parse_failures;
    if (o.consensus_checked) (o.consensus_valid ? report.consensus_valid
                                                : report.consensus_invalid) += 1;
    if (o.status == "annotated") {
      ++report.annotated;
      annotated_out += o.payload.dump();
      annotated_out += "\n";
    } else if (o.status == "review") {
      ++report.review;
      ++report.scorer_flagged;
      review_out += o.payload.dump();
      review_out += "\n";
    } else if (o.status == "dropped") {
      ++report.dropped;
      nlohmann::json rec = o.payload;
      rec["id"] = o.id;
      dropped_out += rec.dump();
      dropped_out += "\n";
    } else {
      ++report.deferred;
    }
    nlohmann::json ck = {{"id", o.id},
                         {"status", o.status},
                         {"payload", o.payload},
                         {"consensus_checked", o.consensus_checked},
                         {"consensus_valid", o.consensus_valid},
                         {"parse_failures", o.parse_failures}};
    checkpoint_out += ck.dump();
    checkpoint_out += "\n";
  }

  write_file(cfg.out_dir + "/annotated.jsonl", annotated_out);
  write_file(cfg.out_dir + "/review.jsonl", review_out);
  write_file(cfg.out_dir + "/dropped.jsonl", dropped_out);
  write_file(cfg.out_dir + "/report.json", report.to_json().dump(2) + "\n");
  if (!cfg.checkpoint_path.empty()) write_file(cfg.checkpoint_path, checkpoint_out);
  return report;
}

LoadedPipeline load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("FileNotFound", "cannot open pipeline config " + path);
  nlohmann::json cfg = nlohmann::json::parse(in, nullptr, false);
  if (cfg.is_discarded()) throw Error("MalformedConfig", "pipeline config is not valid JSON");

  LoadedPipeline loaded;
  auto make_client = [&](const nlohmann::json& entry) -> std::unique_ptr<AnnotatorClient> {
    const std::string name = entry.at("name").get<std::string>();
    if (entry.contains("fixtures"))
      return std::make_unique<MockClient>(name, entry["fixtures"].get<std::string>());
    if (entry.contains("endpoint"))
      return std::make_unique<RemoteClient>(name, entry["endpoint"].get<std::string>());
    throw Error("MalformedConfig", "client " + name + " needs \"fixtures\" or \"endpoint\"");
  };
  if (!cfg.contains("annotators") || cfg["annotators"].size() != 3)
    throw Error("MalformedConfig", "pipeline config needs exactly 3 annotators");
  for (const auto& client : cfg["annotators"]) loaded.clients.push_back(make_client(client));
  if (!cfg.contains("scorer")) throw Error("MalformedConfig", "pipeline config needs a scorer");
  loaded.clients.push_back(make_client(cfg["scorer"]));

  auto& pc = loaded.config;
  pc.annotation_template = cfg.value("annotation_template", pc.annotation_template);
  pc.scorer_template = cfg.value("scorer_template", pc.scorer_template);
  pc.review_threshold = cfg.value("review_threshold", pc.review_threshold);
  pc.concurrency = cfg.value("concurrency", pc.concurrency);
  pc.strict_consensus = cfg.value("strict_consensus", pc.strict_consensus);
  pc.max_attempts = cfg.value("max_attempts", pc.max_attempts);
  pc.backoff_ms = cfg.value("backoff_ms", pc.backoff_ms);
  pc.checkpoint_path = cfg.value("checkpoint", pc.checkpoint_path);
  return loaded;
}

}  // namespace stanceval
