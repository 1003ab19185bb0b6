#include "persuade/response_parser.hpp"

#include <array>
#include <cctype>
#include <optional>

namespace persuade {

namespace {

constexpr std::array<std::string_view, 5> kWords = {"one", "two", "three", "four", "five"};

std::string lower_trimmed(std::string_view s) {
  const auto keep = [](unsigned char c) { return std::isalnum(c) != 0; };
  std::size_t b = 0, e = s.size();
  while (b < e && !keep(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && !keep(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out;
  for (char c : s.substr(b, e - b)) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::string fold_key(std::string_view key) {
  std::string out;
  for (unsigned char c : key)
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

// End of the balanced object starting at text[start] == '{', or npos.
std::size_t matching_brace(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

const json* find_key(const json& obj, std::string_view folded) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (fold_key(it.key()) == folded) return &it.value();
  return nullptr;
}

// Object holding both comment keys: obj itself or something nested in it.
const json* find_comment_pair(const json& obj, int depth = 0) {
  if (!obj.is_object()) return nullptr;
  if (find_key(obj, "comment1") && find_key(obj, "comment2")) return &obj;
  if (depth >= 3) return nullptr;
  for (const auto& v : obj)
    if (const json* hit = find_comment_pair(v, depth + 1)) return hit;
  return nullptr;
}

int parse_rating_value(const json& v, const std::string& path) {
  if (v.is_number_integer() || (v.is_number_float() && v.get<double>() == static_cast<int>(v.get<double>()))) {
    const int s = v.is_number_integer() ? v.get<int>() : static_cast<int>(v.get<double>());
    if (s < kLikertMin || s > kLikertMax)
      throw ResponseParseError(path, "rating " + std::to_string(s) + " outside 1..5");
    return s;
  }
  if (v.is_string()) {
    try {
      return word_to_score(v.get<std::string>());
    } catch (const ResponseParseError& e) {
      throw ResponseParseError(path, e.what());
    }
  }
  throw ResponseParseError(path, "unparseable rating " + v.dump());
}

FeatureVector parse_comment(const json& obj, const std::string& side) {
  if (!obj.is_object()) throw ResponseParseError(side, "expected an object of feature ratings");
  std::array<std::optional<int>, kFeatureCount> seen;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const auto feature = feature_from_response_key(it.key());
    if (!feature || seen[index_of(*feature)]) continue;
    seen[index_of(*feature)] = parse_rating_value(it.value(), side + "/" + std::string(feature_name(*feature)));
  }
  FeatureVector v;
  for (auto f : kFeatures) {
    if (!seen[index_of(f)]) throw ResponseParseError(side + "/" + std::string(feature_name(f)), "missing rating");
    v[f] = *seen[index_of(f)];
  }
  return v;
}

std::optional<int> label_value(const json& v, int depth = 0) {
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  if (v.is_number()) {
    const double d = v.get<double>();
    if (d == 1.0) return 1;
    if (d == 0.0) return 0;
    return std::nullopt;
  }
  if (v.is_string()) {
    const std::string s = lower_trimmed(v.get<std::string>());
    if (s == "1" || s.starts_with("positive") || s == "true") return 1;
    if (s == "0" || s.starts_with("negative") || s == "false") return 0;
    return std::nullopt;
  }
  if (v.is_object() && depth < 2) {
    for (std::string_view key : {"label", "classification", "prediction", "result", "value", "persuasive", "score"})
      if (const json* inner = find_key(v, key))
        if (auto l = label_value(*inner, depth + 1)) return l;
  }
  return std::nullopt;
}

}  // namespace

int word_to_score(std::string_view word) {
  const std::string w = lower_trimmed(word);
  for (std::size_t i = 0; i < kWords.size(); ++i)
    if (w == kWords[i]) return static_cast<int>(i) + 1;
  if (w.size() == 1 && w[0] >= '1' && w[0] <= '5') return w[0] - '0';
  throw ResponseParseError("", "not a rating word: '" + std::string(word) + "'");
}

std::string_view score_to_word(int score) {
  if (score < kLikertMin || score > kLikertMax) throw std::out_of_range("score outside 1..5");
  return kWords[static_cast<std::size_t>(score - 1)];
}

std::vector<json> extract_json_objects(std::string_view text) {
  std::vector<json> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    const std::size_t end = matching_brace(text, pos);
    if (end != std::string_view::npos) {
      auto parsed = json::parse(text.substr(pos, end - pos + 1), nullptr, false);
      if (!parsed.is_discarded() && parsed.is_object()) {
        out.push_back(std::move(parsed));
        pos = end + 1;
        continue;
      }
    }
    ++pos;
  }
  return out;
}

std::pair<FeatureVector, FeatureVector> parse_rating_response(std::string_view text) {
  const auto objects = extract_json_objects(text);
  if (objects.empty()) throw ResponseParseError("", "no JSON object in response");
  for (const auto& obj : objects) {
    if (const json* pair = find_comment_pair(obj))
      return {parse_comment(*find_key(*pair, "comment1"), "comment1"),
              parse_comment(*find_key(*pair, "comment2"), "comment2")};
  }
  const auto& first = objects.front();
  throw ResponseParseError(find_key(first, "comment1") ? "comment2" : "comment1", "missing key");
}

std::pair<int, int> parse_zeroshot_response(std::string_view text) {
  const auto objects = extract_json_objects(text);
  if (objects.empty()) throw ResponseParseError("", "no JSON object in response");

  std::optional<int> first, second;
  auto scan = [&](const json& obj, auto&& self, int depth) -> void {
    if (!obj.is_object()) return;
    if (!first)
      if (const json* v = find_key(obj, "comment1")) first = label_value(*v);
    if (!second)
      if (const json* v = find_key(obj, "comment2")) second = label_value(*v);
    if (depth < 2)
      for (const auto& v : obj) self(v, self, depth + 1);
  };
  for (const auto& obj : objects) scan(obj, scan, 0);

  if (!first) throw ResponseParseError("comment1", "missing or unparseable label");
  if (!second) throw ResponseParseError("comment2", "missing or unparseable label");
  if (*first == *second)
    throw ResponseParseError("", "exactly one comment must be labelled positive, got (" + std::to_string(*first) +
                                     ", " + std::to_string(*second) + ")");
  return {*first, *second};
}

}  // namespace persuade
