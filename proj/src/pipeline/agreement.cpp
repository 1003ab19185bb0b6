#include "persuade/pipeline.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "persuade/numstats.hpp"

namespace persuade {

namespace {

std::string csv_real(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

}  // namespace

AgreementTable run_agreement(std::span<const RatingMatrix> matrices) {
  if (matrices.size() < 2) throw std::invalid_argument("run_agreement: need at least two rating matrices");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  AgreementTable table;
  for (std::size_t a = 0; a < matrices.size(); ++a) {
    for (std::size_t b = a + 1; b < matrices.size(); ++b) {
      const auto& ma = matrices[a];
      const auto& mb = matrices[b];
      std::vector<const FeatureVector*> va, vb;
      for (const auto& [key, v] : ma.rows) {
        const auto other = mb.rows.find(key);
        if (other == mb.rows.end()) continue;
        va.push_back(&v);
        vb.push_back(&other->second);
      }
      if (va.empty())
        throw std::invalid_argument("run_agreement: " + ma.model_name + " and " + mb.model_name + " share no comment");
      for (auto f : kFeatures) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < va.size(); ++i) {
          x.push_back((*va[i])[f]);
          y.push_back((*vb[i])[f]);
        }
        AgreementRow row{f, ma.model_name, mb.model_name, nan, nan, x.size()};
        try {
          const auto r = spearman(x, y);
          row.rho = r.rho;
          row.p_value = r.p_value;
        } catch (const StatsError&) {
          // constant column or fewer than two comments
        }
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

std::string AgreementTable::to_csv() const {
  std::ostringstream out;
  out << "feature,model_a,model_b,rho,p_value,n\n";
  for (const auto& r : rows)
    out << feature_name(r.feature) << ',' << r.model_a << ',' << r.model_b << ',' << csv_real(r.rho) << ','
        << csv_real(r.p_value) << ',' << r.n << '\n';
  return out.str();
}

}  // namespace persuade
