#include "survcode/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "survcode/error.hpp"

namespace survcode::features {

Vocabulary::Vocabulary(NgramRange range, std::vector<std::string> terms,
                       std::vector<std::size_t> document_frequencies,
                       std::size_t document_count)
    : range_(range),
      terms_(std::move(terms)),
      df_(std::move(document_frequencies)),
      document_count_(document_count) {
  if (terms_.size() != df_.size()) {
    throw InvalidArgument("vocabulary: term and df lists differ in length");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (df_[i] == 0 || df_[i] > document_count_) {
      throw InvalidArgument("vocabulary: df out of range for term '" + terms_[i] + "'");
    }
    if (!index_.emplace(terms_[i], i).second) {
      throw InvalidArgument("vocabulary: duplicate term '" + terms_[i] + "'");
    }
  }
}

long Vocabulary::index_of(const std::string& term) const {
  const auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

std::size_t Vocabulary::df(const std::string& term) const {
  const long i = index_of(term);
  return i < 0 ? 0 : df_[static_cast<std::size_t>(i)];
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, NgramRange range) {
  std::vector<std::string> out;
  for (int n = range.min_n; n <= range.max_n; ++n) {
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t start = 0; start + width <= tokens.size(); ++start) {
      std::string gram = tokens[start];
      for (std::size_t k = 1; k < width; ++k) {
        gram += ' ';
        gram += tokens[start + k];
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

Vocabulary fit_vocabulary(std::span<const textprep::Document> docs, NgramRange range) {
  if (docs.empty()) throw InvalidArgument("empty training corpus");
  if (range.min_n < 1 || range.max_n < range.min_n) {
    throw InvalidArgument("invalid ngram range");
  }
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    const auto grams = ngrams(doc.tokens, range);
    const std::unordered_set<std::string> distinct(grams.begin(), grams.end());
    for (const auto& gram : distinct) ++df[gram];
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
  terms.reserve(df.size());
  counts.reserve(df.size());
  for (auto& [term, count] : df) {
    terms.push_back(term);
    counts.push_back(count);
  }
  return Vocabulary(range, std::move(terms), std::move(counts), docs.size());
}

double smooth_idf(std::size_t document_count, std::size_t df) {
  return std::log((1.0 + static_cast<double>(document_count)) /
                  (1.0 + static_cast<double>(df))) +
         1.0;
}

TfidfModel::TfidfModel(Vocabulary vocabulary, bool l2_normalize)
    : vocabulary_(std::move(vocabulary)), l2_normalize_(l2_normalize) {
  idf_.reserve(vocabulary_.size());
  for (std::size_t df : vocabulary_.document_frequencies()) {
    idf_.push_back(smooth_idf(vocabulary_.document_count(), df));
  }
}

TfidfModel::TfidfModel(Vocabulary vocabulary, std::vector<double> idf, bool l2_normalize)
    : vocabulary_(std::move(vocabulary)), idf_(std::move(idf)), l2_normalize_(l2_normalize) {
  if (idf_.size() != vocabulary_.size()) {
    throw InvalidArgument("tfidf: idf length does not match vocabulary");
  }
}

TfidfModel TfidfModel::fit(std::span<const textprep::Document> docs, TfidfOptions options) {
  return TfidfModel(fit_vocabulary(docs, options.ngram_range), options.l2_normalize);
}

SparseVector TfidfModel::transform(const textprep::Document& doc) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& gram : ngrams(doc.tokens, vocabulary_.ngram_range())) {
    const long i = vocabulary_.index_of(gram);
    if (i >= 0) counts[static_cast<std::uint32_t>(i)] += 1.0;
  }
  SparseVector out;
  out.dim = vocabulary_.size();
  for (const auto& [index, count] : counts) out.push(index, count * idf_[index]);
  if (l2_normalize_ && !out.empty()) {
    const double norm = std::sqrt(out.squared_norm());
    for (double& v : out.values) v /= norm;
  }
  return out;
}

std::vector<SparseVector> TfidfModel::transform(std::span<const textprep::Document> docs) const {
  std::vector<SparseVector> rows;
  rows.reserve(docs.size());
  for (const auto& doc : docs) rows.push_back(transform(doc));
  return rows;
}

}  // namespace survcode::features
