#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stanceval/error.hpp"
#include "stanceval/rng.hpp"
#include "stanceval/types.hpp"

namespace stanceval {

// Fleiss's kappa over an item x category count matrix; every row must sum to
// the same number of raters n >= 2. Expected agreement of 1 (all ratings in
// one category everywhere) -> Error("DegenerateAgreement").
double fleiss_kappa(const std::vector<std::vector<int>>& counts);

// Krippendorff's alpha, nominal metric, items x raters with missing ratings
// allowed. Items with fewer than two ratings are skipped; no pairable values
// at all is an error.
double krippendorff_alpha_nominal(const std::vector<std::vector<std::optional<int>>>& data);

// Fraction of items on which all raters produced an identical value.
// Vectors are per rater, one entry per item, equal lengths required.
template <class T>
double exact_match_rate(const std::vector<std::vector<T>>& per_rater) {
  if (per_rater.empty()) throw Error("EmptyInput", "exact_match_rate: no raters");
  const std::size_t n = per_rater.front().size();
  for (const auto& v : per_rater)
    if (v.size() != n)
      throw Error("LengthMismatch", "exact_match_rate: rater vectors differ in length");
  if (n == 0) throw Error("EmptyInput", "exact_match_rate: no items");
  std::size_t matches = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool all_equal = true;
    for (std::size_t r = 1; r < per_rater.size() && all_equal; ++r)
      all_equal = per_rater[r][i] == per_rater[0][i];
    matches += all_equal;
  }
  return static_cast<double>(matches) / static_cast<double>(n);
}

struct BootstrapResult {
  double lo = 0.0;
  double hi = 0.0;
  int degenerate_replicates = 0;  // non-finite statistic values, excluded
};

// Percentile bootstrap. Replicate r resamples with the SplitMix64 substream
// (seed, r), so results are bit-reproducible for a fixed seed regardless of
// thread count. Quantiles use linear interpolation between order statistics.
template <class T, class F>
BootstrapResult bootstrap_ci(F&& statistic, const std::vector<T>& data, int B, double level,
                             std::uint64_t seed) {
  if (B < 200) throw Error("BadArgument", "bootstrap_ci: B must be >= 200");
  if (data.empty()) throw Error("EmptyInput", "bootstrap_ci: no data");
  if (!(level > 0.0 && level < 1.0)) throw Error("BadArgument", "bootstrap_ci: bad level");

  const std::size_t n = data.size();
  std::vector<double> stats(static_cast<std::size_t>(B));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < B; ++r) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(r));
    std::vector<T> resample(n);
    for (std::size_t i = 0; i < n; ++i) resample[i] = data[rng.next_below(n)];
    stats[static_cast<std::size_t>(r)] = statistic(resample);
  }

  std::vector<double> valid;
  valid.reserve(stats.size());
  int degenerate = 0;
  for (double s : stats) {
    if (std::isfinite(s))
      valid.push_back(s);
    else
      ++degenerate;
  }
  if (valid.empty()) throw Error("DegenerateAgreement", "bootstrap_ci: all replicates degenerate");
  std::sort(valid.begin(), valid.end());

  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(valid.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, valid.size() - 1);
    const double frac = h - std::floor(h);
    return valid[lo] * (1.0 - frac) + valid[hi] * frac;
  };
  const double tail = (1.0 - level) / 2.0;
  return {quantile(tail), quantile(1.0 - tail), degenerate};
}

// ---- Multi-rater annotation files and adjudication bookkeeping ----

struct RaterRecord {
  std::string id;
  std::string rater;
  std::vector<TargetStancePair> pairs;
};

// JSONL {"id","rater","pairs":[...]}
std::vector<RaterRecord> load_ratings(const std::string& path);

enum class AdjudicationStatus { auto_agree, adjudicated, excluded };
std::string_view to_string(AdjudicationStatus s);

struct AdjudicationEntry {
  std::string id;
  AdjudicationStatus status = AdjudicationStatus::excluded;
  std::vector<TargetStancePair> final_pairs;
};

// Majority-vote adjudication per sample: unanimous pair sets auto-agree;
// otherwise pairs supported by a strict majority of that sample's raters are
// adopted; samples with no majority pair are excluded.
std::vector<AdjudicationEntry> adjudicate(const std::vector<RaterRecord>& ratings);

struct IaaReport {
  double fleiss = 0.0;
  double krippendorff = 0.0;
  double exact_match = 0.0;
  BootstrapResult fleiss_ci;
  std::int64_t kappa_items = 0;   // (sample, target) units rated by every rater
  std::int64_t alpha_items = 0;   // units with >= 2 ratings
  std::int64_t samples = 0;
};

// Agreement over stance decisions: units are (sample, normalized target)
// pairs; kappa uses units covered by every rater, alpha admits missing
// ratings. Exact match compares whole per-sample annotation sets.
IaaReport iaa_report(const std::vector<RaterRecord>& ratings, int bootstrap_b = 2000,
                     double level = 0.95, std::uint64_t seed = 13);

}  // namespace stanceval
