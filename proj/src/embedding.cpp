#include "stanceval/embedding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "stanceval/error.hpp"
#include "stanceval/rng.hpp"

namespace stanceval {

std::vector<std::vector<double>> EmbeddingProvider::cosine_matrix(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto va = embed(a);
  const auto vb = embed(b);
  std::vector<std::vector<double>> m(a.size(), std::vector<double>(b.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < va[i].size(); ++k) dot += double{va[i][k]} * double{vb[j][k]};
      m[i][j] = dot;  // vectors are unit-norm
    }
  }
  return m;
}

std::size_t OneHotEmbedder::axis(const std::string& token) const {
  return static_cast<std::size_t>(fnv1a64(token) % dim_);
}

std::vector<std::vector<float>> OneHotEmbedder::embed(const std::vector<std::string>& tokens) {
  std::vector<std::vector<float>> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::vector<float> v(dim_, 0.0f);
    v[axis(t)] = 1.0f;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<double>> OneHotEmbedder::cosine_matrix(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> ax(a.size()), bx(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ax[i] = axis(a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) bx[j] = axis(b[j]);
  std::vector<std::vector<double>> m(a.size(), std::vector<double>(b.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m[i][j] = ax[i] == bx[j] ? 1.0 : 0.0;
  return m;
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint, Options options)
    : endpoint_(std::move(endpoint)), options_(options) {}

RemoteEmbedder::~RemoteEmbedder() = default;

std::size_t RemoteEmbedder::dim() const {
  std::shared_lock lock(mutex_);
  return dim_;
}

std::vector<std::vector<float>> RemoteEmbedder::fetch_batch(
    const std::vector<std::string>& batch) {
  nlohmann::json body = {{"texts", batch}, {"per_token", true}};
  const std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options_.backoff_ms << (attempt - 1)));
    }
    httplib::Client cli(endpoint_);
    cli.set_connection_timeout(options_.timeout_seconds);
    cli.set_read_timeout(options_.timeout_seconds);
    auto res = cli.Post("/embed", payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("embeddings") || !reply.contains("dim")) {
      last_error = "malformed embedding response";
      continue;
    }
    const std::size_t d = reply["dim"].get<std::size_t>();
    const auto& embs = reply["embeddings"];
    if (embs.size() != batch.size())
      throw Error("EmbeddingProtocol", "embedding count mismatch: got " +
                                           std::to_string(embs.size()) + " for " +
                                           std::to_string(batch.size()) + " texts");
    std::vector<std::vector<float>> out;
    out.reserve(batch.size());
    for (const auto& e : embs) {
      std::vector<float> v = e.get<std::vector<float>>();
      if (v.size() != d)
        throw Error("EmbeddingDimension", "vector length " + std::to_string(v.size()) +
                                              " != dim " + std::to_string(d));
      out.push_back(std::move(v));
    }
    {
      std::unique_lock lock(mutex_);
      if (dim_ == 0)
        dim_ = d;
      else if (dim_ != d)
        throw Error("EmbeddingDimension", "embedding dimension changed mid-run: " +
                                              std::to_string(dim_) + " -> " + std::to_string(d));
    }
    return out;
  }
  throw Error("EmbeddingUnavailable", "embedding endpoint " + endpoint_ +
                                          " failed after " + std::to_string(options_.max_attempts) +
                                          " attempts: " + last_error);
}

std::vector<std::vector<float>> RemoteEmbedder::embed(const std::vector<std::string>& tokens) {
  std::vector<std::vector<float>> out(tokens.size());
  std::vector<std::size_t> missing;
  {
    std::shared_lock lock(mutex_);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto it = cache_.find(tokens[i]);
      if (it != cache_.end())
        out[i] = it->second;
      else
        missing.push_back(i);
    }
  }
  for (std::size_t start = 0; start < missing.size(); start += options_.batch_size) {
    const std::size_t end = std::min(missing.size(), start + options_.batch_size);
    std::vector<std::string> batch;
    batch.reserve(end - start);
    for (std::size_t k = start; k < end; ++k) batch.push_back(tokens[missing[k]]);
    auto vectors = fetch_batch(batch);
    std::unique_lock lock(mutex_);
    for (std::size_t k = start; k < end; ++k) {
      cache_[tokens[missing[k]]] = vectors[k - start];
      out[missing[k]] = std::move(vectors[k - start]);
    }
  }
  return out;
}

BertScore bert_score(const TokenSeq& candidate, const TokenSeq& reference,
                     EmbeddingProvider& provider) {
  if (candidate.empty() || reference.empty()) return {};
  const auto m = provider.cosine_matrix(candidate.tokens, reference.tokens);

  double p_sum = 0.0;
  for (std::size_t i = 0; i < candidate.size(); ++i)
    p_sum += *std::max_element(m[i].begin(), m[i].end());
  double r_sum = 0.0;
  for (std::size_t j = 0; j < reference.size(); ++j) {
    double best = m[0][j];
    for (std::size_t i = 1; i < candidate.size(); ++i) best = std::max(best, m[i][j]);
    r_sum += best;
  }
  BertScore s;
  s.precision = std::clamp(p_sum / static_cast<double>(candidate.size()), 0.0, 1.0);
  s.recall = std::clamp(r_sum / static_cast<double>(reference.size()), 0.0, 1.0);
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

}  // namespace stanceval
