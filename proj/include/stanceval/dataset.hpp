#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stanceval/types.hpp"

namespace stanceval {

// Remaps foreign JSONL field names (and stance label spellings) onto the
// canonical schema at import time. Mapping string: comma-separated entries,
// "text=content" renames a field, "stance.支持=support" aliases a label value.
struct FieldMap {
  std::string id = "id";
  std::string text = "text";
  std::string pairs = "pairs";
  std::string target = "target";
  std::string stance = "stance";
  std::string meta = "meta";
  std::map<std::string, std::string> stance_aliases;

  static FieldMap parse(const std::string& mapping);
};

// Gold JSONL: {"id","text","pairs":[{"target","stance"}],"meta"?}
// Targets and text are normalized on load; validation errors carry the
// 1-based line number.
std::vector<Sample> load_dataset(const std::string& path);
std::vector<Sample> load_dataset(const std::string& path, const FieldMap& fields);

// Prediction JSONL: {"id","pairs":[...]}. Duplicate targets within one
// record collapse to the first occurrence; a repeated record id is an error.
std::vector<Prediction> load_predictions(const std::string& path);

void save_dataset(const std::vector<Sample>& samples, const std::string& path);
void save_predictions(const std::vector<Prediction>& preds, const std::string& path);

DatasetStats dataset_stats(const std::vector<Sample>& samples);

// Streams one parsed JSON object per non-empty line; fn(line_number, object).
void for_each_jsonl(const std::string& path,
                    const std::function<void(std::size_t, const nlohmann::json&)>& fn);

}  // namespace stanceval
