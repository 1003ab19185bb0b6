#pragma once

// Lenient extraction of structured answers from free-form model output.
// Extraction tolerates prose, code fences, digits in place of words and
// word labels in place of 0/1; validation stays strict.

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "persuade/features.hpp"
#include "persuade/json_util.hpp"

namespace persuade {

class ResponseParseError : public std::runtime_error {
 public:
  ResponseParseError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  // Location inside the response, e.g. "comment2/shareable"; may be empty.
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// "one".."five" (any case) or "1".."5". Throws ResponseParseError carrying the
// offending token.
int word_to_score(std::string_view word);
std::string_view score_to_word(int score);

// Every well-formed top-level JSON object in the text, in order of appearance.
std::vector<json> extract_json_objects(std::string_view text);

// First JSON object holding "comment1" and "comment2", each with all eight
// features. Response keys are matched leniently (see
// feature_from_response_key), so "Persuasive" lands in influential.
std::pair<FeatureVector, FeatureVector> parse_rating_response(std::string_view text);

// Labels for (comment1, comment2); exactly one must be 1. Accepts 0/1 as
// numbers, strings or booleans, "positive"/"negative", and nested objects with
// a label-like field. Separate objects per comment are merged.
std::pair<int, int> parse_zeroshot_response(std::string_view text);

}  // namespace persuade
