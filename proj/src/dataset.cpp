#include "stanceval/dataset.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "stanceval/error.hpp"
#include "stanceval/text_norm.hpp"

namespace stanceval {

std::optional<Stance> parse_stance(std::string_view s) {
  if (s == "support") return Stance::support;
  if (s == "against") return Stance::against;
  if (s == "neutral") return Stance::neutral;
  return std::nullopt;
}

std::string_view to_string(Stance s) {
  switch (s) {
    case Stance::support: return "support";
    case Stance::against: return "against";
    case Stance::neutral: return "neutral";
  }
  return "neutral";
}

std::optional<bool> Sample::explicit_flag(std::size_t pair_index) const {
  if (!meta.is_object()) return std::nullopt;
  const auto it = meta.find("explicit");
  if (it == meta.end() || !it->is_array() || pair_index >= it->size()) return std::nullopt;
  const auto& v = (*it)[pair_index];
  if (!v.is_boolean()) return std::nullopt;
  return v.get<bool>();
}

void for_each_jsonl(const std::string& path,
                    const std::function<void(std::size_t, const nlohmann::json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error("FileNotFound", "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded())
      throw Error("MalformedLine", path + ":" + std::to_string(line_no) + ": invalid JSON");
    fn(line_no, obj);
  }
}

FieldMap FieldMap::parse(const std::string& mapping) {
  FieldMap map;
  std::size_t start = 0;
  while (start <= mapping.size()) {
    const std::size_t end = std::min(mapping.find(',', start), mapping.size());
    const std::string entry = mapping.substr(start, end - start);
    start = end + 1;
    if (entry.empty()) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw Error("BadArgument", "field map entry needs key=value: " + entry);
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    if (key.rfind("stance.", 0) == 0) {
      if (!parse_stance(value))
        throw Error("BadArgument", "stance alias must map onto the label set: " + entry);
      map.stance_aliases[key.substr(7)] = value;
    } else if (key == "id") map.id = value;
    else if (key == "text") map.text = value;
    else if (key == "pairs") map.pairs = value;
    else if (key == "target") map.target = value;
    else if (key == "stance") map.stance = value;
    else if (key == "meta") map.meta = value;
    else throw Error("BadArgument", "unknown field map key: " + key);
  }
  return map;
}

namespace {

std::vector<TargetStancePair> parse_pairs(const nlohmann::json& obj, const std::string& where,
                                          const FieldMap& fields) {
  if (!obj.contains(fields.pairs) || !obj[fields.pairs].is_array())
    throw Error("MalformedLine", where + ": missing \"" + fields.pairs + "\" array");
  std::vector<TargetStancePair> pairs;
  for (const auto& p : obj[fields.pairs]) {
    if (!p.is_object() || !p.contains(fields.target) || !p.contains(fields.stance))
      throw Error("MalformedLine", where + ": pair needs \"" + fields.target + "\" and \"" +
                                       fields.stance + "\"");
    TargetStancePair tsp;
    tsp.target = normalize_text(p[fields.target].get<std::string>());
    std::string stance_str = p[fields.stance].get<std::string>();
    const auto alias = fields.stance_aliases.find(stance_str);
    if (alias != fields.stance_aliases.end()) stance_str = alias->second;
    const auto stance = parse_stance(stance_str);
    if (!stance) throw Error("UnknownStance", where + ": unknown stance \"" + stance_str + "\"");
    tsp.stance = *stance;
    pairs.push_back(std::move(tsp));
  }
  return pairs;
}

std::string require_id(const nlohmann::json& obj, const std::string& where,
                       const FieldMap& fields) {
  if (!obj.contains(fields.id) || !obj[fields.id].is_string())
    throw Error("MalformedLine", where + ": missing \"" + fields.id + "\"");
  return obj[fields.id].get<std::string>();
}

}  // namespace

std::vector<Sample> load_dataset(const std::string& path) { return load_dataset(path, FieldMap()); }

std::vector<Sample> load_dataset(const std::string& path, const FieldMap& fields) {
  std::vector<Sample> samples;
  std::unordered_set<std::string> ids;
  for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& obj) {
    const std::string where = path + ":" + std::to_string(line_no);
    Sample s;
    s.id = require_id(obj, where, fields);
    if (!ids.insert(s.id).second)
      throw Error("DuplicateId", where + ": duplicate sample id \"" + s.id + "\"");
    if (!obj.contains(fields.text) || !obj[fields.text].is_string())
      throw Error("MalformedLine", where + ": missing \"" + fields.text + "\"");
    s.text = normalize_text(obj[fields.text].get<std::string>());
    s.pairs = parse_pairs(obj, where, fields);
    if (s.pairs.empty()) throw Error("EmptyPairs", where + ": sample has no gold pairs");
    std::unordered_set<std::string> targets;
    for (const auto& p : s.pairs) {
      if (p.target.empty())
        throw Error("EmptyTarget", where + ": target empty after normalization");
      if (!targets.insert(p.target).second)
        throw Error("DuplicateTarget",
                    where + ": duplicate gold target \"" + p.target + "\"");
    }
    if (obj.contains(fields.meta)) s.meta = obj[fields.meta];
    samples.push_back(std::move(s));
  });
  return samples;
}

std::vector<Prediction> load_predictions(const std::string& path) {
  std::vector<Prediction> preds;
  std::unordered_set<std::string> ids;
  const FieldMap fields;
  for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& obj) {
    const std::string where = path + ":" + std::to_string(line_no);
    Prediction p;
    p.id = require_id(obj, where, fields);
    if (!ids.insert(p.id).second)
      throw Error("DuplicateId", where + ": duplicate prediction id \"" + p.id + "\"");
    std::unordered_set<std::string> seen;
    for (auto& pair : parse_pairs(obj, where, fields)) {
      if (pair.target.empty()) continue;  // nothing left after normalization
      if (seen.insert(pair.target).second) p.pairs.push_back(std::move(pair));
    }
    preds.push_back(std::move(p));
  });
  return preds;
}

namespace {

nlohmann::json pairs_to_json(const std::vector<TargetStancePair>& pairs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pairs)
    arr.push_back({{"target", p.target}, {"stance", std::string(to_string(p.stance))}});
  return arr;
}

}  // namespace

void save_dataset(const std::vector<Sample>& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("FileWrite", "cannot write " + path);
  for (const auto& s : samples) {
    nlohmann::json obj = {{"id", s.id}, {"text", s.text}, {"pairs", pairs_to_json(s.pairs)}};
    if (!s.meta.is_null()) obj["meta"] = s.meta;
    out << obj.dump() << "\n";
  }
}

void save_predictions(const std::vector<Prediction>& preds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("FileWrite", "cannot write " + path);
  for (const auto& p : preds) {
    nlohmann::json obj = {{"id", p.id}, {"pairs", pairs_to_json(p.pairs)}};
    out << obj.dump() << "\n";
  }
}

DatasetStats dataset_stats(const std::vector<Sample>& samples) {
  DatasetStats stats;
  std::unordered_map<std::string, TargetRow> by_target;
  for (const auto& s : samples) {
    ++stats.total;
    const int bucket = target_bucket(s.pairs.size());
    ++stats.by_bucket[static_cast<std::size_t>(bucket)];
    for (const auto& p : s.pairs) {
      const auto si = static_cast<std::size_t>(p.stance);
      ++stats.stance_by_bucket[static_cast<std::size_t>(bucket)][si];
      ++stats.stance_total[si];
      auto& row = by_target[p.target];
      row.target = p.target;
      ++row.count;
      ++row.by_stance[si];
    }
  }
  stats.targets.reserve(by_target.size());
  for (auto& [_, row] : by_target) stats.targets.push_back(std::move(row));
  std::sort(stats.targets.begin(), stats.targets.end(), [](const TargetRow& a, const TargetRow& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.target < b.target;
  });
  return stats;
}

}  // namespace stanceval
