#include "persuade/prompts.hpp"

#include <stdexcept>

#include "persuade/json_util.hpp"

namespace persuade {

// Transcribed byte for byte, including trailing spaces and the malformed
// special tokens in the rating prompt ("begin_of_text|>" without its opening
// "<|", "<|end_header_id>" without its closing "|").
const std::string_view kZeroShotTemplate =
    "<|begin_of_text|><|start_header_id|>system<|end_header_id|>\n"
    "You are a classifier evaluating the persuasiveness of two comments on an original post. \n"
    "Identify which comment is more persuasive. \n"
    "Label the more persuasive comment as \"positive\" (1) and the less persuasive as \"negative\" (0).\n"
    "\n"
    "Input includes:\n"
    "- \"op_text\": original post text\n"
    "- \"comment1\": first comment\n"
    "- \"comment2\": second comment\n"
    "\n"
    "Provide the result as a JSON object for each comment. No explanation is required.\n"
    "<|eot_id|><|start_header_id|>user<|end_header_id|>\n"
    "Here is the context and comments: {context}\n"
    "<|eot_id|><|start_header_id|>assistant<|end_header_id|>";

const std::string_view kRatingTemplate =
    "begin_of_text|><|start_header_id|>system<|end_header_id|>\n"
    "You are an expert evaluator tasked with rating two comments based on their context within an original post. \n"
    "Each feature is rated from \"one\" (lowest) to \"five\" (highest).\n"
    "\n"
    "Input includes: \"op_text\" (original post), \"comment1\" (first comment in response to op_text), and "
    "\"comment2\" (second comment in response to op_text).\n"
    "\n"
    "Features to evaluate:\n"
    "- Persuasive: How effectively the comment influences the reader's perspective.\n"
    "- Interesting: How engaging and attention-grabbing the comment is.\n"
    "- Interesting if True: Potential interest level if the comment's claims were true.\n"
    "- Positive: Overall positivity, focusing on an uplifting or encouraging tone.\n"
    "- Negative: Overall negativity, considering critical or discouraging aspects.\n"
    "- Shareable: Likelihood of the comment being shared.\n"
    "- Truthfulness: Apparent accuracy and credibility of the comment.\n"
    "- Attention: Ability to capture and maintain reader focus.\n"
    "\n"
    "Return the ratings for each feature for both comments as a JSON object with keys for each feature under "
    "\"comment1\" and \"comment2\" based on their relation to \"op_text,\" using words (\"one\" to \"five\") for "
    "ratings. \n"
    "Provide only the JSON object with no explanation.\n"
    "\n"
    "<|eot_id|><|start_header_id|>user<|end_header_id>\n"
    "Here is the context and comments: {context}\n"
    "<|eot_id|><|start_header_id|>assistant<|end_header_id>";

namespace {

std::string fill(std::string_view tmpl, std::string_view op_text, std::string_view comment1,
                 std::string_view comment2) {
  if (op_text.empty() || comment1.empty() || comment2.empty())
    throw std::invalid_argument("prompt inputs must be nonempty");
  const auto at = tmpl.find(kContextPlaceholder);
  std::string out;
  out.reserve(tmpl.size() + op_text.size() + comment1.size() + comment2.size() + 64);
  out.append(tmpl.substr(0, at));
  out.append(serialize_context(op_text, comment1, comment2));
  out.append(tmpl.substr(at + kContextPlaceholder.size()));
  return out;
}

}  // namespace

std::string serialize_context(std::string_view op_text, std::string_view comment1,
                              std::string_view comment2) {
  ordered_json ctx;
  ctx["op_text"] = std::string(op_text);
  ctx["comment1"] = std::string(comment1);
  ctx["comment2"] = std::string(comment2);
  return ctx.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string build_rating_prompt(std::string_view op_text, std::string_view comment1,
                                std::string_view comment2) {
  return fill(kRatingTemplate, op_text, comment1, comment2);
}

std::string build_zeroshot_prompt(std::string_view op_text, std::string_view comment1,
                                  std::string_view comment2) {
  return fill(kZeroShotTemplate, op_text, comment1, comment2);
}

PromptKind classify_prompt(std::string_view prompt) noexcept {
  if (prompt.find("Features to evaluate:") != std::string_view::npos) return PromptKind::rating;
  if (prompt.find("Identify which comment is more persuasive.") != std::string_view::npos)
    return PromptKind::zeroshot;
  return PromptKind::unknown;
}

}  // namespace persuade
