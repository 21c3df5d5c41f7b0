#pragma once

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "stanceval/text_norm.hpp"

namespace stanceval {

// Produces one unit-norm vector per token. Implementations must be
// deterministic for identical input and keep a fixed dimension per instance.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;
  virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& tokens) = 0;

  // Pairwise cosine similarities between two token lists. The default
  // materializes vectors via embed(); backends with structure (one-hot) may
  // answer directly.
  virtual std::vector<std::vector<double>> cosine_matrix(const std::vector<std::string>& a,
                                                         const std::vector<std::string>& b);
};

// Test/reference backend: token t maps to axis fnv1a64(t) mod dim, so equal
// tokens have cosine 1 and distinct tokens are orthogonal unless their hashes
// collide (probability ~1/dim per pair; default dim 2^20 keeps that below
// 1e-6). axis() is exposed so tests can verify a vocabulary is collision-free.
class OneHotEmbedder final : public EmbeddingProvider {
 public:
  explicit OneHotEmbedder(std::size_t dim = std::size_t{1} << 20) : dim_(dim) {}

  std::size_t dim() const override { return dim_; }
  std::size_t axis(const std::string& token) const;
  std::vector<std::vector<float>> embed(const std::vector<std::string>& tokens) override;
  std::vector<std::vector<double>> cosine_matrix(const std::vector<std::string>& a,
                                                 const std::vector<std::string>& b) override;

 private:
  std::size_t dim_;
};

// HTTP backend speaking POST {endpoint}/embed with body
// {"texts":[...],"per_token":true} and response {"embeddings":[[...],...],
// "dim":n}, one vector per requested string. Requests are batched and
// responses cached per token; the cache takes concurrent readers and
// serializes writers. Transient failures are retried with exponential
// backoff; a dimension change mid-run is fatal.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  struct Options {
    int timeout_seconds = 30;
    int max_attempts = 3;
    int backoff_ms = 100;  // doubled per retry
    std::size_t batch_size = 64;
  };

  explicit RemoteEmbedder(std::string endpoint) : RemoteEmbedder(std::move(endpoint), Options()) {}
  RemoteEmbedder(std::string endpoint, Options options);
  ~RemoteEmbedder() override;

  std::size_t dim() const override;
  std::vector<std::vector<float>> embed(const std::vector<std::string>& tokens) override;

 private:
  std::vector<std::vector<float>> fetch_batch(const std::vector<std::string>& batch);

  std::string endpoint_;
  Options options_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::vector<float>> cache_;
  std::size_t dim_ = 0;  // fixed by the first response
};

struct BertScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Greedy-matching BERTScore: P = mean over candidate tokens of the best
// cosine against reference tokens, R symmetric, F1 harmonic mean. P and R
// are clamped to [0,1]; empty candidate or reference -> all zeros.
BertScore bert_score(const TokenSeq& candidate, const TokenSeq& reference,
                     EmbeddingProvider& provider);

}  // namespace stanceval
