// Independent reference implementations used only by tests. Each one takes a
// deliberately different route than the library code it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "stanceval/assignment.hpp"
#include "stanceval/text_norm.hpp"

namespace oracles {

// LCS by exhaustive subsequence enumeration of the shorter sequence
// (feasible for lengths <= 12, which is what the fixtures use).
inline std::size_t lcs_exhaustive(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  const std::size_t n = small.size();
  std::size_t best = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<const std::string*> sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) sub.push_back(&small[i]);
    if (sub.size() <= best) continue;
    // is `sub` a subsequence of `large`?
    std::size_t j = 0;
    for (const auto& tok : large) {
      if (j < sub.size() && tok == *sub[j]) ++j;
    }
    if (j == sub.size()) best = sub.size();
  }
  return best;
}

// Sentence BLEU recomputed with naive vector scans instead of hash maps.
inline double bleu_bruteforce(const std::vector<std::string>& cand,
                              const std::vector<std::string>& ref) {
  if (cand.empty() || ref.empty()) return 0.0;
  const std::size_t max_n = std::min<std::size_t>(4, std::min(cand.size(), ref.size()));

  auto ngram_at = [](const std::vector<std::string>& toks, std::size_t i, std::size_t n) {
    std::vector<std::string> g(toks.begin() + static_cast<long>(i),
                               toks.begin() + static_cast<long>(i + n));
    return g;
  };
  auto count_in = [&](const std::vector<std::string>& toks, const std::vector<std::string>& g) {
    std::size_t c = 0;
    for (std::size_t i = 0; i + g.size() <= toks.size(); ++i) {
      bool eq = true;
      for (std::size_t k = 0; k < g.size(); ++k)
        if (toks[i + k] != g[k]) {
          eq = false;
          break;
        }
      c += eq;
    }
    return c;
  };

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    // distinct candidate n-grams, each clipped against the reference
    std::vector<std::vector<std::string>> seen;
    double matches = 0.0;
    const double total = static_cast<double>(cand.size() - n + 1);
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
      const auto g = ngram_at(cand, i, n);
      if (std::find(seen.begin(), seen.end(), g) != seen.end()) continue;
      seen.push_back(g);
      matches += static_cast<double>(std::min(count_in(cand, g), count_in(ref, g)));
    }
    double p;
    if (matches == 0.0) {
      if (n == 1) return 0.0;
      p = 1.0 / (total + 1.0);
    } else {
      p = matches / total;
    }
    log_sum += std::log(p) / static_cast<double>(max_n);
  }
  const double bp = std::min(
      1.0, std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(cand.size())));
  return bp * std::exp(log_sum);
}

struct OverlapScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// BERTScore under a one-hot embedder reduces to token-set overlap when the
// tokens inside each sequence are unique.
inline OverlapScore onehot_bert_set_oracle(const std::vector<std::string>& cand,
                                           const std::vector<std::string>& ref) {
  OverlapScore s;
  if (cand.empty() || ref.empty()) return s;
  const std::set<std::string> cand_set(cand.begin(), cand.end());
  const std::set<std::string> ref_set(ref.begin(), ref.end());
  std::size_t in_ref = 0;
  for (const auto& t : cand)
    if (ref_set.count(t)) ++in_ref;
  std::size_t in_cand = 0;
  for (const auto& t : ref)
    if (cand_set.count(t)) ++in_cand;
  s.precision = static_cast<double>(in_ref) / static_cast<double>(cand.size());
  s.recall = static_cast<double>(in_cand) / static_cast<double>(ref.size());
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

// Exhaustive max-weight assignment: enumerates every way to match
// min(rows, cols) entries and re-evaluates each candidate with the library's
// row-order accumulator so equal matchings sum bit-identically.
inline double assignment_exhaustive(const std::vector<std::vector<double>>& w) {
  const int rows = static_cast<int>(w.size());
  if (rows == 0) return 0.0;
  const int cols = static_cast<int>(w.front().size());
  if (cols == 0) return 0.0;
  const int want = std::min(rows, cols);

  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> assign(static_cast<std::size_t>(rows), -1);
  std::vector<bool> used(static_cast<std::size_t>(cols), false);

  auto recurse = [&](auto&& self, int row, int matched) -> void {
    if (matched == want) {
      best = std::max(best, stanceval::assignment_total(w, assign));
      return;
    }
    if (row == rows) return;
    if (rows - row < want - matched) return;  // cannot finish
    for (int c = 0; c < cols; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      used[static_cast<std::size_t>(c)] = true;
      assign[static_cast<std::size_t>(row)] = c;
      self(self, row + 1, matched + 1);
      used[static_cast<std::size_t>(c)] = false;
      assign[static_cast<std::size_t>(row)] = -1;
    }
    if (rows - row > want - matched) self(self, row + 1, matched);  // leave this row out
  };
  recurse(recurse, 0, 0);
  return best;
}

// Greedy assignment (repeatedly take the best remaining cell), for the
// optimal >= greedy property.
inline double assignment_greedy(const std::vector<std::vector<double>>& w) {
  const std::size_t rows = w.size();
  if (rows == 0) return 0.0;
  const std::size_t cols = w.front().size();
  std::vector<bool> row_used(rows, false), col_used(cols, false);
  double total = 0.0;
  const std::size_t want = std::min(rows, cols);
  for (std::size_t k = 0; k < want; ++k) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        if (col_used[j]) continue;
        if (w[i][j] > best) {
          best = w[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    row_used[bi] = col_used[bj] = true;
    total += best;
  }
  return total;
}

inline std::vector<std::string> tokens(std::initializer_list<const char*> list) {
  std::vector<std::string> out;
  for (const char* s : list) out.emplace_back(s);
  return out;
}

inline stanceval::TokenSeq seq(std::vector<std::string> toks) {
  stanceval::TokenSeq s;
  s.tokens = std::move(toks);
  return s;
}

}  // namespace oracles
