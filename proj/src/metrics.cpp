#include "stanceval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

namespace stanceval {

namespace {

// n-gram key: tokens joined with an unlikely separator byte.
std::string ngram_key(const std::vector<std::string>& toks, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t k = 0; k < n; ++k) {
    if (k) key.push_back('\x1F');
    key += toks[start + k];
  }
  return key;
}

}  // namespace

double bleu(const TokenSeq& candidate, const TokenSeq& reference) {
  const auto& cand = candidate.tokens;
  const auto& ref = reference.tokens;
  if (cand.empty() || ref.empty()) return 0.0;

  const std::size_t max_n = std::min<std::size_t>(4, std::min(cand.size(), ref.size()));
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    std::unordered_map<std::string, int> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) ++ref_counts[ngram_key(ref, i, n)];
    std::unordered_map<std::string, int> cand_counts;
    for (std::size_t i = 0; i + n <= cand.size(); ++i) ++cand_counts[ngram_key(cand, i, n)];

    long matches = 0;
    long total = 0;
    for (const auto& [key, count] : cand_counts) {
      total += count;
      const auto it = ref_counts.find(key);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    double p;
    if (matches == 0) {
      if (n == 1) return 0.0;
      p = 1.0 / (static_cast<double>(total) + 1.0);  // add-one smoothing
    } else {
      p = static_cast<double>(matches) / static_cast<double>(total);
    }
    log_sum += std::log(p) / static_cast<double>(max_n);
  }
  const double bp =
      std::min(1.0, std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(cand.size())));
  return bp * std::exp(log_sum);
}

double rouge_l(const TokenSeq& candidate, const TokenSeq& reference) {
  const auto& a = candidate.tokens;
  const auto& b = reference.tokens;
  if (a.empty() || b.empty()) return 0.0;

  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[b.size()]);
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(a.size());
  const double r = lcs / static_cast<double>(b.size());
  return 2.0 * p * r / (p + r);
}

}  // namespace stanceval
