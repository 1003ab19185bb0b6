#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace persuade {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// JSON has no inf/nan. Non-finite doubles are written as the strings "inf",
// "-inf" and "nan" so model files reload bit-exactly.
ordered_json encode_real(double value);
double decode_real(const json& value);

// Line-delimited JSON. Blank lines are skipped; parse failures name the
// 1-based line number.
std::vector<std::pair<std::size_t, json>> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<ordered_json>& records);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// UTC, second resolution, ISO 8601 ("2026-01-31T12:00:00Z").
std::string utc_timestamp();

}  // namespace persuade
