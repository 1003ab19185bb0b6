#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "persuade/numstats.hpp"

namespace persuade {

std::vector<double> average_ranks(std::span<const double> values) {
  if (values.empty()) throw StatsError("average_ranks: empty input");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 (0-based) are tied: mean of 1-based ranks i+1..j
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatsError("pearson: length mismatch");
  if (x.size() < 2) throw StatsError("pearson: need at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw StatsError("correlation undefined: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double student_t_two_sided(double t, double dof) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(dof);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))), 0.0, 1.0);
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatsError("spearman: length mismatch");
  if (x.size() < 3) throw StatsError("spearman: need at least three points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  CorrelationResult r;
  r.n = x.size();
  r.rho = pearson(rx, ry);
  const double dof = static_cast<double>(r.n - 2);
  const double denom = 1.0 - r.rho * r.rho;
  r.p_value = denom <= 0.0 ? 0.0 : student_t_two_sided(r.rho * std::sqrt(dof / denom), dof);
  return r;
}

}  // namespace persuade
