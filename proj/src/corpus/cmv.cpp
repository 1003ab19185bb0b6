#include <iostream>

#include "persuade/corpus.hpp"
#include "persuade/json_util.hpp"

namespace persuade {

namespace {

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

std::string line_prefix(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ": line " + std::to_string(line) + ": ";
}

std::string required_string(const json& rec, const char* field, const std::string& prefix) {
  auto it = rec.find(field);
  if (it == rec.end() || !it->is_string())
    throw DatasetError(prefix + "malformed record: missing string field '" + field + "'");
  return it->get<std::string>();
}

CmvThread parse_thread(const json& rec, const std::string& prefix) {
  if (!rec.is_object()) throw DatasetError(prefix + "malformed record: not an object");

  CmvThread t;
  t.id = required_string(rec, "id", prefix);
  t.op_text = required_string(rec, "op_text", prefix);
  t.positive = required_string(rec, "positive", prefix);
  const std::string split = required_string(rec, "split", prefix);
  try {
    t.split = split_from_string(split);
  } catch (const DatasetError& e) {
    throw DatasetError(prefix + e.what());
  }

  if (auto it = rec.find("negatives"); it != rec.end()) {
    if (!it->is_array()) throw DatasetError(prefix + "malformed record: 'negatives' is not an array");
    for (const auto& n : *it) {
      if (!n.is_string()) throw DatasetError(prefix + "malformed record: non-string negative");
      t.negative_candidates.push_back(n.get<std::string>());
    }
  } else if (auto neg = rec.find("negative"); neg != rec.end()) {
    if (!neg->is_string()) throw DatasetError(prefix + "malformed record: 'negative' is not a string");
    t.negative_candidates.push_back(neg->get<std::string>());
    t.pre_paired = true;
  } else {
    throw DatasetError(prefix + "malformed record: needs 'negatives' or 'negative'");
  }

  if (blank(t.id)) throw DatasetError(prefix + "empty id");
  if (blank(t.op_text)) throw DatasetError("record " + t.id + ": empty op_text");
  if (blank(t.positive)) throw DatasetError("record " + t.id + ": empty positive");
  if (t.negative_candidates.empty()) throw DatasetError("record " + t.id + ": empty negatives");
  for (std::size_t i = 0; i < t.negative_candidates.size(); ++i)
    if (blank(t.negative_candidates[i]))
      throw DatasetError("record " + t.id + ": empty negative candidate " + std::to_string(i));
  if (t.pre_paired && t.negative_candidates.front() == t.positive)
    throw DatasetError("record " + t.id + ": positive and negative are identical");
  return t;
}

}  // namespace

std::string_view to_string(Split split) noexcept { return split == Split::train ? "train" : "test"; }

Split split_from_string(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "test") return Split::test;
  throw DatasetError("invalid split '" + std::string(text) + "' (expected train or test)");
}

void warn_to_stderr(std::string_view message) { std::cerr << "warning: " << message << '\n'; }

std::vector<CmvThread> load_cmv_dataset(const std::filesystem::path& path, const WarningSink& warn) {
  std::vector<CmvThread> threads;
  std::size_t train = 0, test = 0;
  for (const auto& [line, rec] : read_jsonl(path)) {
    threads.push_back(parse_thread(rec, line_prefix(path, line)));
    (threads.back().split == Split::train ? train : test)++;
  }
  if (warn && (train != kReferenceTrainThreads || test != kReferenceTestThreads)) {
    warn(path.string() + ": split sizes train=" + std::to_string(train) + " test=" +
         std::to_string(test) + " differ from the reference " +
         std::to_string(kReferenceTrainThreads) + "/" + std::to_string(kReferenceTestThreads));
  }
  return threads;
}

void save_cmv_dataset(const std::filesystem::path& path, std::span<const CmvThread> threads) {
  std::vector<ordered_json> records;
  records.reserve(threads.size());
  for (const auto& t : threads) {
    ordered_json r;
    r["id"] = t.id;
    r["op_text"] = t.op_text;
    r["positive"] = t.positive;
    if (t.pre_paired && t.negative_candidates.size() == 1)
      r["negative"] = t.negative_candidates.front();
    else
      r["negatives"] = t.negative_candidates;
    r["split"] = std::string(to_string(t.split));
    records.push_back(std::move(r));
  }
  write_jsonl(path, records);
}

void save_pairs(const std::filesystem::path& path, std::span<const ThreadPair> pairs) {
  std::vector<ordered_json> records;
  records.reserve(pairs.size());
  for (const auto& p : pairs) {
    ordered_json r;
    r["id"] = p.id;
    r["op_text"] = p.op_text;
    r["positive"] = p.positive;
    r["negative"] = p.negative;
    r["split"] = std::string(to_string(p.split));
    r["pair_similarity"] = p.pair_similarity;
    records.push_back(std::move(r));
  }
  write_jsonl(path, records);
}

}  // namespace persuade
