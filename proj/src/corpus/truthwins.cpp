#include <cmath>
#include <map>

#include "persuade/corpus.hpp"
#include "persuade/json_util.hpp"

namespace persuade {

namespace {

TruthWinsRecord parse_record(const json& rec, const std::string& where) {
  if (!rec.is_object()) throw DatasetError(where + "malformed record: not an object");
  auto str = [&](const char* field) {
    auto it = rec.find(field);
    if (it == rec.end()) throw DatasetError(where + "missing field '" + field + "'");
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    throw DatasetError(where + "field '" + field + "' must be a string");
  };

  TruthWinsRecord r;
  r.message_id = str("message_id");
  r.rater_id = str("rater_id");

  auto bu = rec.find("belief_update");
  if (bu == rec.end() || !bu->is_number()) throw DatasetError(where + "missing numeric belief_update");
  r.belief_update = bu->get<double>();
  if (!(r.belief_update >= kBeliefMin && r.belief_update <= kBeliefMax))
    throw DatasetError(where + "belief_update " + bu->dump() + " outside [-100, 100]");

  for (auto f : kFeatures) {
    const std::string name(feature_name(f));
    auto it = rec.find(name);
    if (it == rec.end() || !it->is_number()) throw DatasetError(where + "missing numeric " + name);
    const double v = it->get<double>();
    if (v != std::floor(v) || v < kLikertMin || v > kLikertMax)
      throw DatasetError(where + name + " value " + it->dump() + " outside Likert 1..5");
    r.ratings[index_of(f)] = static_cast<int>(v);
  }
  return r;
}

}  // namespace

std::vector<TruthWinsRecord> load_truthwins(const std::filesystem::path& path) {
  std::vector<TruthWinsRecord> out;
  for (const auto& [line, rec] : read_jsonl(path))
    out.push_back(parse_record(rec, path.string() + ": row " + std::to_string(line) + ": "));
  return out;
}

void save_truthwins(const std::filesystem::path& path, std::span<const TruthWinsRecord> records) {
  std::vector<ordered_json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) {
    ordered_json j;
    j["message_id"] = r.message_id;
    j["rater_id"] = r.rater_id;
    j["belief_update"] = r.belief_update;
    // Field order as in the source data.
    for (auto f : {Feature::attention, Feature::interesting, Feature::interesting_if_true,
                   Feature::positive_emotion, Feature::negative_emotion, Feature::influential,
                   Feature::shareable, Feature::truthfulness})
      j[std::string(feature_name(f))] = r.rating(f);
    lines.push_back(std::move(j));
  }
  write_jsonl(path, lines);
}

std::vector<TruthWinsMessage> aggregate_messages(std::span<const TruthWinsRecord> records) {
  if (records.empty()) throw DatasetError("aggregate_messages: no records");

  struct Sums {
    double belief = 0.0;
    std::array<double, kFeatureCount> ratings{};
    std::size_t count = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Sums, std::less<>> sums;
  for (const auto& r : records) {
    auto [it, inserted] = sums.try_emplace(r.message_id);
    if (inserted) order.push_back(r.message_id);
    it->second.belief += r.belief_update;
    for (std::size_t i = 0; i < kFeatureCount; ++i) it->second.ratings[i] += r.ratings[i];
    ++it->second.count;
  }

  std::vector<TruthWinsMessage> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    const auto& s = sums.find(id)->second;
    const double n = static_cast<double>(s.count);
    TruthWinsMessage m;
    m.message_id = id;
    m.rater_count = s.count;
    m.mean_belief_update = s.belief / n;
    for (std::size_t i = 0; i < kFeatureCount; ++i) m.mean_ratings[i] = s.ratings[i] / n;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace persuade
