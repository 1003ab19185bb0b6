#include "persuade/json_util.hpp"
#include "persuade/llm_client.hpp"

namespace persuade {

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    for (const auto& [line, rec] : read_jsonl(path_)) {
      CacheEntry e;
      e.key = rec.at("key").get<std::string>();
      e.model_name = rec.at("model").get<std::string>();
      e.response_text = rec.at("response").get<std::string>();
      e.created_at = rec.value("created_at", "");
      entries_[e.key] = std::move(e);
    }
  } else if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open cache file " + path_.string());
}

std::optional<std::string> ResponseCache::lookup(std::string_view model_name, std::string_view prompt) const {
  const auto key = cache_key(model_name, prompt);
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.response_text;
}

void ResponseCache::store(std::string_view model_name, std::string_view prompt, std::string_view response) {
  CacheEntry e{cache_key(model_name, prompt), std::string(model_name), std::string(response), utc_timestamp()};
  std::lock_guard lock(mutex_);
  if (out_.is_open()) {
    ordered_json rec;
    rec["key"] = e.key;
    rec["model"] = e.model_name;
    rec["response"] = e.response_text;
    rec["created_at"] = e.created_at;
    out_ << rec.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    out_.flush();
  }
  entries_[e.key] = std::move(e);
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<CacheEntry> ResponseCache::entries() const {
  std::lock_guard lock(mutex_);
  std::vector<CacheEntry> out;
  for (const auto& [key, e] : entries_) out.push_back(e);
  return out;
}

}  // namespace persuade
