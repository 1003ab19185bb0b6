#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "persuade/linear_models.hpp"
#include "persuade/numstats.hpp"

namespace persuade {

namespace {

struct Candidate {
  std::size_t column;
  double p_value;
};

// Fit on `columns` (in that order) and return the p-value of each column.
std::vector<double> column_p_values(const Matrix& X, std::span<const double> y,
                                    const std::vector<std::size_t>& columns) {
  const OlsModel m = fit_ols(X.select_columns(columns), y);
  return {m.p_values.begin() + 1, m.p_values.end()};
}

}  // namespace

OlsModel stepwise_select(const Matrix& X, std::span<const double> y,
                         const std::vector<std::string>& feature_names,
                         const StepwiseOptions& options) {
  const std::size_t p = X.cols();
  const std::size_t n = X.rows();
  if (feature_names.size() != p) throw std::invalid_argument("stepwise_select: feature name count mismatch");
  if (y.size() != n) throw std::invalid_argument("stepwise_select: y length mismatch");
  if (n < 3) throw std::invalid_argument("stepwise_select: need at least three observations");

  // Collinearity screen, in input order.
  std::vector<std::size_t> eligible;
  std::vector<std::string> screened;
  std::vector<std::vector<double>> columns(p);
  for (std::size_t j = 0; j < p; ++j) columns[j] = X.column(j);
  for (std::size_t j = 0; j < p; ++j) {
    bool problematic = sample_stddev(columns[j]) == 0.0;
    for (std::size_t k : eligible) {
      if (problematic) break;
      problematic = std::fabs(pearson(columns[j], columns[k])) > options.collinearity_cutoff;
    }
    if (problematic)
      screened.push_back(feature_names[j]);
    else
      eligible.push_back(j);
  }

  auto by_name = [&](std::size_t a, std::size_t b) { return feature_names[a] < feature_names[b]; };
  std::sort(eligible.begin(), eligible.end(), by_name);

  std::vector<std::size_t> included;
  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    bool changed = false;

    // Forward step.
    if (included.size() + 2 < n) {
      std::optional<Candidate> best;
      for (std::size_t c : eligible) {
        if (std::find(included.begin(), included.end(), c) != included.end()) continue;
        auto trial = included;
        trial.push_back(c);
        double pv;
        try {
          pv = column_p_values(X, y, trial).back();
        } catch (const CollinearityError&) {
          continue;
        }
        if (!best || pv < best->p_value) best = Candidate{c, pv};
      }
      if (best && best->p_value < options.alpha) {
        included.push_back(best->column);
        changed = true;
      }
    }

    // Backward steps, one removal at a time.
    while (!included.empty()) {
      const auto pvs = column_p_values(X, y, included);
      std::optional<std::size_t> worst;
      for (std::size_t k = 0; k < included.size(); ++k) {
        if (pvs[k] < options.alpha) continue;
        if (!worst || pvs[k] > pvs[*worst] ||
            (pvs[k] == pvs[*worst] && by_name(included[k], included[*worst])))
          worst = k;
      }
      if (!worst) break;
      included.erase(included.begin() + static_cast<std::ptrdiff_t>(*worst));
      changed = true;
    }

    if (!changed) break;
  }

  std::sort(included.begin(), included.end());
  std::vector<std::string> selected_names;
  for (std::size_t c : included) selected_names.push_back(feature_names[c]);

  OlsModel model = fit_ols(X.select_columns(included), y, selected_names);
  model.feature_names = feature_names;
  model.excluded_features = std::move(screened);
  model.alpha = options.alpha;
  return model;
}

}  // namespace persuade
