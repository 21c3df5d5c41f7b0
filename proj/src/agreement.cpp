#include "stanceval/agreement.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "stanceval/dataset.hpp"
#include "stanceval/text_norm.hpp"

namespace stanceval {

double fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  if (counts.size() < 2) throw Error("BadArgument", "fleiss_kappa: need >= 2 items");
  const std::size_t categories = counts.front().size();
  long n_raters = 0;
  for (int c : counts.front()) n_raters += c;
  if (n_raters < 2) throw Error("BadArgument", "fleiss_kappa: need >= 2 raters per item");

  double p_bar = 0.0;
  std::vector<double> category_share(categories, 0.0);
  for (const auto& row : counts) {
    if (row.size() != categories)
      throw Error("BadArgument", "fleiss_kappa: ragged count matrix");
    long row_sum = 0;
    double sq = 0.0;
    for (std::size_t j = 0; j < categories; ++j) {
      if (row[j] < 0) throw Error("BadArgument", "fleiss_kappa: negative count");
      row_sum += row[j];
      sq += static_cast<double>(row[j]) * static_cast<double>(row[j]);
      category_share[j] += row[j];
    }
    if (row_sum != n_raters)
      throw Error("BadArgument", "fleiss_kappa: rows must all sum to the rater count");
    p_bar += (sq - static_cast<double>(n_raters)) /
             (static_cast<double>(n_raters) * static_cast<double>(n_raters - 1));
  }
  p_bar /= static_cast<double>(counts.size());

  const double total = static_cast<double>(counts.size()) * static_cast<double>(n_raters);
  double p_e = 0.0;
  for (double share : category_share) {
    const double pj = share / total;
    p_e += pj * pj;
  }
  if (p_e >= 1.0)
    throw Error("DegenerateAgreement", "fleiss_kappa: expected agreement is 1");
  return (p_bar - p_e) / (1.0 - p_e);
}

double krippendorff_alpha_nominal(const std::vector<std::vector<std::optional<int>>>& data) {
  // Coincidence matrix: each unit with m >= 2 ratings contributes every
  // ordered value pair with weight 1/(m-1).
  std::map<std::pair<int, int>, double> coincidence;
  std::map<int, double> marginal;
  double n_total = 0.0;
  std::size_t pairable_units = 0;
  for (const auto& unit : data) {
    std::vector<int> vals;
    for (const auto& v : unit)
      if (v.has_value()) vals.push_back(*v);
    const std::size_t m = vals.size();
    if (m < 2) continue;
    ++pairable_units;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        coincidence[{vals[i], vals[j]}] += w;
      }
  }
  if (pairable_units < 2)
    throw Error("NoPairableValues", "krippendorff_alpha: need >= 2 items with >= 2 ratings");
  for (const auto& [key, mass] : coincidence) {
    marginal[key.first] += mass;
    n_total += mass;
  }
  double agree = 0.0;
  for (const auto& [key, mass] : coincidence)
    if (key.first == key.second) agree += mass;

  double expected_agree = 0.0;
  for (const auto& [_, nc] : marginal) expected_agree += nc * (nc - 1.0);
  expected_agree /= n_total * (n_total - 1.0);
  if (expected_agree >= 1.0)
    throw Error("DegenerateAgreement", "krippendorff_alpha: expected agreement is 1");
  const double observed_agree = agree / n_total;
  return (observed_agree - expected_agree) / (1.0 - expected_agree);
}

std::vector<RaterRecord> load_ratings(const std::string& path) {
  std::vector<RaterRecord> out;
  for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& obj) {
    const std::string where = path + ":" + std::to_string(line_no);
    RaterRecord r;
    if (!obj.contains("id") || !obj.contains("rater"))
      throw Error("MalformedLine", where + ": ratings need \"id\" and \"rater\"");
    r.id = obj["id"].get<std::string>();
    r.rater = obj["rater"].get<std::string>();
    if (!obj.contains("pairs") || !obj["pairs"].is_array())
      throw Error("MalformedLine", where + ": missing \"pairs\"");
    for (const auto& p : obj["pairs"]) {
      TargetStancePair tsp;
      tsp.target = normalize_text(p.at("target").get<std::string>());
      const auto stance = parse_stance(p.at("stance").get<std::string>());
      if (!stance) throw Error("UnknownStance", where + ": unknown stance");
      tsp.stance = *stance;
      r.pairs.push_back(std::move(tsp));
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::string_view to_string(AdjudicationStatus s) {
  switch (s) {
    case AdjudicationStatus::auto_agree: return "auto-agree";
    case AdjudicationStatus::adjudicated: return "adjudicated";
    case AdjudicationStatus::excluded: return "excluded";
  }
  return "excluded";
}

namespace {

std::vector<TargetStancePair> canonical(std::vector<TargetStancePair> pairs) {
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

struct SampleRatings {
  std::map<std::string, std::vector<TargetStancePair>> by_rater;
};

std::map<std::string, SampleRatings> group_ratings(const std::vector<RaterRecord>& ratings) {
  std::map<std::string, SampleRatings> grouped;
  for (const auto& r : ratings) {
    auto& slot = grouped[r.id].by_rater[r.rater];
    slot = canonical(r.pairs);
  }
  return grouped;
}

}  // namespace

std::vector<AdjudicationEntry> adjudicate(const std::vector<RaterRecord>& ratings) {
  const auto grouped = group_ratings(ratings);
  std::vector<AdjudicationEntry> out;
  for (const auto& [id, sample] : grouped) {
    AdjudicationEntry entry;
    entry.id = id;
    const std::size_t raters = sample.by_rater.size();
    bool unanimous = true;
    const auto& first = sample.by_rater.begin()->second;
    for (const auto& [_, pairs] : sample.by_rater)
      if (pairs != first) unanimous = false;
    if (unanimous) {
      entry.status = AdjudicationStatus::auto_agree;
      entry.final_pairs = first;
    } else {
      // strict majority per (target, stance) pair
      std::map<TargetStancePair, std::size_t> votes;
      for (const auto& [_, pairs] : sample.by_rater)
        for (const auto& p : pairs) ++votes[p];
      for (const auto& [pair, n] : votes)
        if (2 * n > raters) entry.final_pairs.push_back(pair);
      entry.status = entry.final_pairs.empty() ? AdjudicationStatus::excluded
                                               : AdjudicationStatus::adjudicated;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

IaaReport iaa_report(const std::vector<RaterRecord>& ratings, int bootstrap_b, double level,
                     std::uint64_t seed) {
  const auto grouped = group_ratings(ratings);
  if (grouped.empty()) throw Error("EmptyInput", "iaa_report: no ratings");

  std::set<std::string> all_raters;
  for (const auto& [_, sample] : grouped)
    for (const auto& [rater, __] : sample.by_rater) all_raters.insert(rater);
  const std::size_t n_raters = all_raters.size();

  // Units are (sample, target). Kappa needs every rater's stance; alpha
  // accepts any unit with >= 2 ratings.
  std::vector<std::vector<int>> kappa_counts;
  std::vector<std::vector<std::optional<int>>> alpha_data;
  for (const auto& [id, sample] : grouped) {
    std::set<std::string> targets;
    for (const auto& [_, pairs] : sample.by_rater)
      for (const auto& p : pairs) targets.insert(p.target);
    for (const auto& target : targets) {
      std::vector<std::optional<int>> row;
      std::vector<int> counts(3, 0);
      std::size_t rated = 0;
      for (const auto& rater : all_raters) {
        const auto it = sample.by_rater.find(rater);
        std::optional<int> stance;
        if (it != sample.by_rater.end()) {
          for (const auto& p : it->second)
            if (p.target == target) stance = static_cast<int>(p.stance);
        }
        row.push_back(stance);
        if (stance) {
          ++counts[static_cast<std::size_t>(*stance)];
          ++rated;
        }
      }
      if (rated >= 2) alpha_data.push_back(row);
      if (rated == n_raters && n_raters >= 2) kappa_counts.push_back(counts);
    }
  }

  IaaReport report;
  report.samples = static_cast<std::int64_t>(grouped.size());
  report.kappa_items = static_cast<std::int64_t>(kappa_counts.size());
  report.alpha_items = static_cast<std::int64_t>(alpha_data.size());
  report.fleiss = fleiss_kappa(kappa_counts);
  report.krippendorff = krippendorff_alpha_nominal(alpha_data);

  // exact match over serialized whole-sample pair sets
  std::vector<std::vector<std::string>> serialized;
  for (const auto& rater : all_raters) {
    std::vector<std::string> rows;
    for (const auto& [_, sample] : grouped) {
      std::string repr;
      const auto it = sample.by_rater.find(rater);
      if (it != sample.by_rater.end())
        for (const auto& p : it->second) {
          repr += p.target;
          repr.push_back('\x1F');
          repr += to_string(p.stance);
          repr.push_back('\x1E');
        }
      rows.push_back(std::move(repr));
    }
    serialized.push_back(std::move(rows));
  }
  report.exact_match = exact_match_rate(serialized);

  report.fleiss_ci = bootstrap_ci(
      [](const std::vector<std::vector<int>>& rows) {
        try {
          return fleiss_kappa(rows);
        } catch (const Error&) {
          return std::numeric_limits<double>::quiet_NaN();
        }
      },
      kappa_counts, bootstrap_b, level, seed);
  return report;
}

}  // namespace stanceval
