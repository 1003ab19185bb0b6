#pragma once

// Ranks, Spearman correlation with a t-approximation p-value, accuracy and
// ROC AUC. Labels are 0/1 ints throughout.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace persuade {

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// 1-based ranks; tied values share the mean of the positions they cover.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation. Throws StatsError on length mismatch, n < 2 or a
// constant input.
double pearson(std::span<const double> x, std::span<const double> y);

// rho is the Pearson correlation of average ranks. The two-sided p-value uses
// t = rho * sqrt((n - 2) / (1 - rho^2)) on n - 2 degrees of freedom.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

// Two-sided tail probability P(|T| >= |t|) for Student's t.
double student_t_two_sided(double t, double dof);

double accuracy(std::span<const int> predicted, std::span<const int> actual);

// Mann-Whitney formulation: P(score of a random positive > score of a random
// negative), ties counted as one half. O(n log n) via rank sums.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

double mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

}  // namespace persuade
