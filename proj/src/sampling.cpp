#include "stanceval/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stanceval/error.hpp"
#include "stanceval/rng.hpp"

namespace stanceval {

StrataMode parse_strata_mode(std::string_view name) {
  if (name == "bucket") return StrataMode::bucket;
  if (name == "bucket+stance" || name == "bucket_stance") return StrataMode::bucket_stance;
  throw Error("BadArgument", "unknown strata mode: " + std::string(name));
}

StratumKey stratum_key(const Sample& sample, StrataMode mode) {
  StratumKey key;
  key.bucket = target_bucket(sample.pairs.size());
  if (mode == StrataMode::bucket_stance) {
    std::array<int, 3> counts = {0, 0, 0};
    for (const auto& p : sample.pairs) ++counts[static_cast<std::size_t>(p.stance)];
    std::sort(counts.begin(), counts.end());
    key.stance_signature = counts;
  }
  return key;
}

std::map<StratumKey, std::vector<std::string>> stratify(const std::vector<Sample>& samples,
                                                        StrataMode mode) {
  std::map<StratumKey, std::vector<std::string>> strata;
  for (const auto& s : samples) strata[stratum_key(s, mode)].push_back(s.id);
  for (auto& [_, ids] : strata) std::sort(ids.begin(), ids.end());
  return strata;
}

std::vector<std::string> draw_subset(const std::map<StratumKey, std::vector<std::string>>& strata,
                                     std::size_t size, std::uint64_t seed) {
  std::uint64_t population = 0;
  for (const auto& [_, ids] : strata) population += ids.size();
  if (size > population)
    throw Error("BadArgument", "requested subset larger than the population");

  // Largest-remainder allocation in pure integer arithmetic: stratum i gets
  // floor(size*n_i/N) plus one of the `size - sum(floors)` largest
  // remainders (ties by stratum order).
  struct Alloc {
    std::size_t index;
    std::uint64_t quota;
    std::uint64_t remainder;
  };
  std::vector<Alloc> allocs;
  std::size_t idx = 0;
  std::uint64_t allocated = 0;
  for (const auto& [_, ids] : strata) {
    const std::uint64_t num = static_cast<std::uint64_t>(size) * ids.size();
    allocs.push_back({idx++, num / population, num % population});
    allocated += allocs.back().quota;
  }
  std::uint64_t leftover = size - allocated;
  std::vector<std::size_t> order(allocs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return allocs[a].remainder > allocs[b].remainder;
  });
  for (std::size_t k = 0; k < order.size() && leftover > 0; ++k, --leftover)
    ++allocs[order[k]].quota;

  std::vector<std::string> out;
  out.reserve(size);
  idx = 0;
  for (const auto& [_, ids] : strata) {
    const std::uint64_t take = allocs[idx].quota;
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(idx));
    ++idx;
    if (take == 0) continue;
    // partial Fisher-Yates over the sorted id list
    std::vector<std::string> pool = ids;
    for (std::uint64_t i = 0; i < take; ++i) {
      const std::uint64_t j = i + rng.next_below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Regularized incomplete beta by Lentz's continued fraction.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, int df) {
  const double x = static_cast<double>(df) / (static_cast<double>(df) + t * t);
  const double tail = 0.5 * incomplete_beta(static_cast<double>(df) / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

}  // namespace

double student_t_quantile(double p, int df) {
  if (!(p > 0.0 && p < 1.0)) throw Error("BadArgument", "t quantile: p must be in (0,1)");
  if (df < 1) throw Error("BadArgument", "t quantile: df must be >= 1");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);
  double lo = 0.0, hi = 1.0;
  while (student_t_cdf(hi, df) < p) hi *= 2.0;  // bracket
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

RunAggregate aggregate_runs(const std::vector<double>& per_draw_values) {
  const std::size_t k = per_draw_values.size();
  if (k < 2) throw Error("BadArgument", "aggregate_runs: need >= 2 draws");
  RunAggregate agg;
  for (double v : per_draw_values) agg.mean += v;
  agg.mean /= static_cast<double>(k);
  double ss = 0.0;
  for (double v : per_draw_values) ss += (v - agg.mean) * (v - agg.mean);
  agg.stddev = std::sqrt(ss / static_cast<double>(k - 1));
  agg.t_value = student_t_quantile(0.975, static_cast<int>(k) - 1);
  const double half = agg.t_value * agg.stddev / std::sqrt(static_cast<double>(k));
  agg.ci_lo = agg.mean - half;
  agg.ci_hi = agg.mean + half;
  return agg;
}

}  // namespace stanceval
