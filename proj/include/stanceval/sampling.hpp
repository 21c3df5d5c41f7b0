#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stanceval/types.hpp"

namespace stanceval {

enum class StrataMode { bucket, bucket_stance };
StrataMode parse_strata_mode(std::string_view name);  // "bucket" | "bucket+stance"

struct StratumKey {
  int bucket = 0;  // target-count bucket, see target_bucket()
  // Sorted (ascending) counts of {support, against, neutral} among the gold
  // pairs; all zeros in bucket-only mode.
  std::array<int, 3> stance_signature = {0, 0, 0};

  friend auto operator<=>(const StratumKey&, const StratumKey&) = default;
};

StratumKey stratum_key(const Sample& sample, StrataMode mode);

// Partition into strata; ids sorted within each stratum.
std::map<StratumKey, std::vector<std::string>> stratify(
    const std::vector<Sample>& samples, StrataMode mode = StrataMode::bucket_stance);

// Proportional allocation by largest remainder (integer arithmetic, ties by
// stratum order), then within-stratum sampling without replacement using the
// SplitMix64 substream (seed, stratum index). Output sorted by id. Identical
// input, size and seed give byte-identical output on every platform.
std::vector<std::string> draw_subset(const std::map<StratumKey, std::vector<std::string>>& strata,
                                     std::size_t size, std::uint64_t seed);

struct RunAggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, n-1
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double t_value = 0.0;  // two-sided 95% Student-t quantile at K-1 df
};

// mean +- t_{0.975,K-1} * stddev / sqrt(K) over K >= 2 per-draw values.
RunAggregate aggregate_runs(const std::vector<double>& per_draw_values);

// Student-t quantile via the regularized incomplete beta function, bisected
// to full double precision. p in (0,1), df >= 1.
double student_t_quantile(double p, int df);

}  // namespace stanceval
