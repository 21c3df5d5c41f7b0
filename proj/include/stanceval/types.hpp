#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace stanceval {

enum class Stance : int { support = 0, against = 1, neutral = 2 };

inline constexpr std::array<Stance, 3> kAllStances = {Stance::support, Stance::against,
                                                      Stance::neutral};

// Strict parse over the closed label set; anything else is an error.
std::optional<Stance> parse_stance(std::string_view s);
std::string_view to_string(Stance s);

struct TargetStancePair {
  std::string target;  // non-empty, normalized
  Stance stance = Stance::neutral;

  friend bool operator==(const TargetStancePair&, const TargetStancePair&) = default;
  friend auto operator<=>(const TargetStancePair&, const TargetStancePair&) = default;
};

struct Sample {
  std::string id;
  std::string text;  // normalized
  std::vector<TargetStancePair> pairs;  // gold, size >= 1, distinct targets
  nlohmann::json meta;  // optional object; recognized keys: topic, user,
                        // explicit (array of bool aligned with pairs)

  // Per-target explicit/implicit flag when meta carries one.
  std::optional<bool> explicit_flag(std::size_t pair_index) const;
};

struct Prediction {
  std::string id;
  std::vector<TargetStancePair> pairs;  // duplicates collapsed to first occurrence
};

struct TargetRow {
  std::string target;
  std::int64_t count = 0;
  std::array<std::int64_t, 3> by_stance = {0, 0, 0};
};

struct DatasetStats {
  std::int64_t total = 0;
  // bucket 0: single, 1: dual, 2: triple, 3: multi (>= 4 targets)
  std::array<std::int64_t, 4> by_bucket = {0, 0, 0, 0};
  std::array<std::array<std::int64_t, 3>, 4> stance_by_bucket = {};
  std::array<std::int64_t, 3> stance_total = {0, 0, 0};
  std::vector<TargetRow> targets;  // sorted by count desc, then target asc
};

// Target-count bucket: 1 -> 0, 2 -> 1, 3 -> 2, >= 4 -> 3.
inline int target_bucket(std::size_t n_targets) {
  return n_targets >= 4 ? 3 : static_cast<int>(n_targets) - 1;
}

inline constexpr std::array<std::string_view, 4> kBucketNames = {"single", "dual", "triple",
                                                                 "multi"};

}  // namespace stanceval
