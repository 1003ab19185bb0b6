#include "persuade/pipeline.hpp"

#include <algorithm>

namespace persuade {

namespace {

template <typename Value>
std::vector<Value> with_products(std::span<const Value> base) {
  std::vector<Value> out(base.begin(), base.end());
  out.reserve(base.size() + kInteractionTerms + 1);
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = i + 1; j < base.size(); ++j) out.push_back(base[i] * base[j]);
  return out;
}

std::vector<double> predictor_values(const std::array<double, kFeatureCount>& means, DesignMode mode) {
  if (mode == DesignMode::independent) return {means.begin(), means.end()};
  return with_products<double>(means);
}

std::vector<std::string> predictor_names(DesignMode mode) {
  if (mode == DesignMode::interaction) return interaction_column_names();
  std::vector<std::string> names;
  for (auto f : kFeatures) names.emplace_back(feature_name(f));
  return names;
}

}  // namespace

std::string_view to_string(DesignMode mode) noexcept {
  return mode == DesignMode::independent ? "independent" : "interaction";
}

DesignMode design_mode_from_string(std::string_view text) {
  if (text == "independent") return DesignMode::independent;
  if (text == "interaction") return DesignMode::interaction;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected independent or interaction)");
}

std::string_view hybrid_method(DesignMode mode) noexcept {
  return mode == DesignMode::independent ? kMethods[3] : kMethods[4];
}

std::vector<double> expand_interactions(const FeatureVector& v) {
  const auto reals = v.as_reals();
  auto out = with_products<double>(reals);
  if (v.belief_update) out.push_back(*v.belief_update);
  return out;
}

std::vector<std::string> interaction_column_names() {
  std::vector<std::string> names;
  for (auto f : kFeatures) names.emplace_back(feature_name(f));
  for (std::size_t i = 0; i < kFeatureCount; ++i)
    for (std::size_t j = i + 1; j < kFeatureCount; ++j)
      names.push_back(std::string(feature_name(kFeatures[i])) + "*" + std::string(feature_name(kFeatures[j])));
  return names;
}

std::vector<std::string> design_column_names(DesignMode mode) {
  auto names = predictor_names(mode);
  names.emplace_back(kBeliefColumn);
  return names;
}

Matrix belief_predictors(std::span<const TruthWinsMessage> messages, DesignMode mode) {
  Matrix X;
  for (const auto& m : messages) X.append_row(predictor_values(m.mean_ratings, mode));
  return X;
}

BeliefModel fit_belief_model(std::span<const TruthWinsMessage> messages, DesignMode mode,
                             const StepwiseOptions& options) {
  if (messages.empty()) throw std::invalid_argument("fit_belief_model: no Truth Wins messages");
  std::vector<double> y;
  y.reserve(messages.size());
  for (const auto& m : messages) y.push_back(m.mean_belief_update);
  return BeliefModel{mode, stepwise_select(belief_predictors(messages, mode), y, predictor_names(mode), options)};
}

double predict_belief(const BeliefModel& model, const FeatureVector& v) {
  const auto names = predictor_names(model.mode);
  const auto values = predictor_values(v.as_reals(), model.mode);
  NamedRow row;
  for (std::size_t i = 0; i < names.size(); ++i) row.emplace(names[i], values[i]);
  return predict_ols(model.ols, row);
}

BeliefScores score_beliefs(const BeliefModel& model, const RatingMatrix& matrix) {
  BeliefScores scores;
  for (const auto& [key, v] : matrix.rows) scores.emplace(key, predict_belief(model, v));
  return scores;
}

ordered_json to_json(const BeliefModel& model) {
  ordered_json j;
  j["mode"] = std::string(to_string(model.mode));
  j["target"] = "mean_belief_update";
  j["ols"] = to_json(model.ols);
  return j;
}

BeliefModel belief_model_from_json(const json& j) {
  return BeliefModel{design_mode_from_string(j.at("mode").get<std::string>()), ols_from_json(j.at("ols"))};
}

Design Design::subset(Split split) const {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (splits[i] == split) keep.push_back(i);
  Design out;
  out.X = X.select_rows(keep);
  out.columns = columns;
  out.excluded_threads = excluded_threads;
  for (auto i : keep) {
    out.y.push_back(y[i]);
    out.rows.push_back(rows[i]);
    out.splits.push_back(splits[i]);
  }
  return out;
}

Design assemble_design(const RatingMatrix& matrix, const BeliefScores& beliefs, DesignMode mode,
                       std::span<const ThreadPair> pairs) {
  std::vector<const ThreadPair*> ordered;
  for (const auto& p : pairs) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [](const ThreadPair* a, const ThreadPair* b) { return a->id < b->id; });

  Design d;
  d.columns = design_column_names(mode);
  d.X = Matrix(0, d.columns.size());
  std::vector<std::string> missing;
  for (const ThreadPair* p : ordered) {
    if (!matrix.has_thread(p->id)) {
      d.excluded_threads.push_back(p->id);
      continue;
    }
    for (Side side : {Side::positive, Side::negative}) {
      const RowKey key{p->id, side};
      const auto belief = beliefs.find(key);
      if (belief == beliefs.end()) {
        missing.push_back(p->id + "/" + std::string(to_string(side)));
        continue;
      }
      FeatureVector v = matrix.rows.at(key);
      v.belief_update = belief->second;
      std::vector<double> values;
      if (mode == DesignMode::interaction) {
        values = expand_interactions(v);
      } else {
        const auto reals = v.as_reals();
        values.assign(reals.begin(), reals.end());
        values.push_back(belief->second);
      }
      d.X.append_row(values);
      d.y.push_back(side == Side::positive ? 1 : 0);
      d.rows.push_back(key);
      d.splits.push_back(p->split);
    }
  }
  if (!missing.empty()) {
    std::string what = "assemble_design: no belief score for " + std::to_string(missing.size()) + " rows:";
    for (const auto& k : missing) what += " " + k;
    throw std::invalid_argument(what);
  }
  return d;
}

}  // namespace persuade
