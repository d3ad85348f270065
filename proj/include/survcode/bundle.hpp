#pragma once

#include <string>
#include <vector>

#include "survcode/features.hpp"
#include "survcode/labels.hpp"
#include "survcode/multilabel.hpp"
#include "survcode/svm.hpp"
#include "survcode/textprep.hpp"

namespace survcode {

// Everything `predict` needs: preprocessing rules, lemmatizer dictionary,
// fitted TF-IDF model, label space with training frequencies, and the
// fitted meta-algorithm. Doubles are written with round-trip precision, so
// a reloaded bundle predicts bit-identically.
struct ModelBundle {
  textprep::NormalizationRules rules;
  textprep::Lemmatizer lemmatizer;
  features::TfidfModel tfidf;
  LabelSpace space;
  std::vector<std::size_t> label_frequency;
  svm::TrainConfig svm;
  multilabel::ChainTraining chain_training = multilabel::ChainTraining::ground_truth;
  std::uint64_t seed = 0;
  multilabel::MetaModel model;

  multilabel::Algorithm algorithm() const { return multilabel::algorithm_of(model); }
};

inline constexpr int kBundleVersion = 1;

std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& text);
void save_bundle(const std::string& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::string& path);

}  // namespace survcode
