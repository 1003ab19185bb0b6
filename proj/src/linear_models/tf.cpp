#include <algorithm>
#include <map>

#include "persuade/corpus.hpp"
#include "persuade/linear_models.hpp"

namespace persuade {

SparseMatrix SparseMatrix::from_dense(const Matrix& dense) {
  SparseMatrix out;
  out.cols = dense.cols();
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    SparseRow row;
    for (std::size_t c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) == 0.0) continue;
      row.index.push_back(static_cast<std::uint32_t>(c));
      row.value.push_back(dense(r, c));
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> which) const {
  SparseMatrix out;
  out.cols = cols;
  out.rows.reserve(which.size());
  for (std::size_t r : which) out.rows.push_back(rows.at(r));
  return out;
}

TfVectorizer::TfVectorizer(std::vector<std::string> vocabulary) : vocabulary_(std::move(vocabulary)) {
  std::sort(vocabulary_.begin(), vocabulary_.end());
  vocabulary_.erase(std::unique(vocabulary_.begin(), vocabulary_.end()), vocabulary_.end());
}

TfVectorizer TfVectorizer::fit(std::span<const std::string> texts) {
  std::vector<std::string> vocab;
  for (const auto& text : texts)
    for (auto& tok : tokenize_sequence(text)) vocab.push_back(std::move(tok));
  return TfVectorizer(std::move(vocab));
}

SparseRow TfVectorizer::transform(std::string_view text) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& tok : tokenize_sequence(text)) {
    auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), tok);
    if (it == vocabulary_.end() || *it != tok) continue;
    counts[static_cast<std::uint32_t>(it - vocabulary_.begin())] += 1.0;
  }
  SparseRow row;
  row.index.reserve(counts.size());
  row.value.reserve(counts.size());
  for (const auto& [idx, count] : counts) {
    row.index.push_back(idx);
    row.value.push_back(count);
  }
  return row;
}

SparseMatrix TfVectorizer::transform(std::span<const std::string> texts) const {
  SparseMatrix out;
  out.cols = vocabulary_.size();
  out.rows.reserve(texts.size());
  for (const auto& t : texts) out.rows.push_back(transform(t));
  return out;
}

TfResult tf_vectorize(std::span<const std::string> texts) {
  if (texts.empty()) throw std::invalid_argument("tf_vectorize: empty corpus");
  auto vectorizer = TfVectorizer::fit(texts);
  return TfResult{vectorizer.transform(texts), vectorizer.vocabulary()};
}

}  // namespace persuade
