#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "survcode/sparse.hpp"
#include "survcode/textprep.hpp"

namespace survcode::features {

struct NgramRange {
  int min_n = 1;
  int max_n = 1;
};

// Fitted term dictionary. Terms are sorted lexicographically, so column
// indices do not depend on document order.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(NgramRange range, std::vector<std::string> terms,
             std::vector<std::size_t> document_frequencies, std::size_t document_count);

  std::size_t size() const { return terms_.size(); }
  NgramRange ngram_range() const { return range_; }
  std::size_t document_count() const { return document_count_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& document_frequencies() const { return df_; }

  // Column index of a term, or -1 when out of vocabulary.
  long index_of(const std::string& term) const;
  std::size_t df(const std::string& term) const;

 private:
  NgramRange range_;
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::size_t document_count_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

// All n-grams of the token sequence for n in range, joined with a space.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, NgramRange range);

// Throws InvalidArgument("empty training corpus") when docs is empty.
Vocabulary fit_vocabulary(std::span<const textprep::Document> docs, NgramRange range = {});

struct TfidfOptions {
  NgramRange ngram_range;
  bool l2_normalize = true;
};

// tf = raw count, idf = ln((1 + N) / (1 + df)) + 1, rows L2-normalized.
class TfidfModel {
 public:
  TfidfModel() = default;
  TfidfModel(Vocabulary vocabulary, bool l2_normalize);
  // Restores a serialized model; idf must match the vocabulary.
  TfidfModel(Vocabulary vocabulary, std::vector<double> idf, bool l2_normalize);

  static TfidfModel fit(std::span<const textprep::Document> docs, TfidfOptions options = {});

  SparseVector transform(const textprep::Document& doc) const;
  std::vector<SparseVector> transform(std::span<const textprep::Document> docs) const;

  const Vocabulary& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }
  bool l2_normalize() const { return l2_normalize_; }
  std::size_t dim() const { return vocabulary_.size(); }

 private:
  Vocabulary vocabulary_;
  std::vector<double> idf_;
  bool l2_normalize_ = true;
};

double smooth_idf(std::size_t document_count, std::size_t df);

}  // namespace survcode::features
