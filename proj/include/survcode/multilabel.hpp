#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "survcode/labels.hpp"
#include "survcode/sparse.hpp"
#include "survcode/svm.hpp"

namespace survcode::multilabel {

// Predicted labels plus one score per label of the label space. Scores are
// margins for BR and CC, vote fractions for ECC, and empty for LP.
struct Prediction {
  LabelSet labels;
  std::vector<double> scores;
};

std::vector<std::size_t> label_frequencies(std::span<const LabelSet> Y, std::size_t n_labels);

// ---- Binary Relevance ------------------------------------------------------

struct BinaryRelevance {
  std::size_t n_labels = 0;
  std::vector<svm::BinaryModel> models;  // one per label index
};

BinaryRelevance br_fit(std::span<const SparseVector> X, std::span<const LabelSet> Y,
                       std::size_t n_labels, const svm::TrainConfig& cfg, unsigned threads = 1);
// Labels with margin > 0.
Prediction br_predict(const BinaryRelevance& model, const SparseVector& x);

// ---- Label Powerset --------------------------------------------------------

// Distinct training labelsets; `frequencies[k]` counts sets[k].
struct LabelsetRegistry {
  std::vector<LabelSet> sets;
  std::vector<std::size_t> frequencies;

  // Throws DataError when a training labelset is empty.
  static LabelsetRegistry build(std::span<const LabelSet> Y);
  std::size_t size() const { return sets.size(); }
  // Registry index of a set, or -1.
  long index_of(const LabelSet& set) const;
};

struct LabelPowerset {
  LabelsetRegistry registry;
  svm::MulticlassModel classifier;  // classes are registry indices
};

LabelPowerset lp_fit(std::span<const SparseVector> X, std::span<const LabelSet> Y,
                     const svm::TrainConfig& cfg, unsigned threads = 1);
Prediction lp_predict(const LabelPowerset& model, const SparseVector& x);

// ---- Classifier Chains -----------------------------------------------------

struct ChainSpec {
  std::vector<LabelIndex> order;
  std::uint64_t bootstrap_seed = 0;

  // Throws InvalidArgument unless order is a permutation of 0..n_labels-1.
  void validate(std::size_t n_labels) const;
};

// Which earlier-label values augment the features while training a chain.
// Prediction always feeds the chain's own predictions forward.
enum class ChainTraining { ground_truth, predicted };

const char* to_string(ChainTraining mode);
ChainTraining chain_training_from_string(const std::string& name);

struct ClassifierChain {
  ChainSpec spec;
  std::size_t feature_dim = 0;           // base feature space
  std::vector<svm::BinaryModel> models;  // models[k] predicts spec.order[k]
};

struct ChainOutput {
  LabelSet labels;
  std::vector<int> binary;       // 0/1 per label index
  std::vector<double> margins;   // per label index
};

// Features for chain position k: x plus indicators of the k earlier labels.
SparseVector chain_features(const SparseVector& x, std::span<const int> earlier);

ClassifierChain cc_fit(std::span<const SparseVector> X, std::span<const LabelSet> Y,
                       std::size_t n_labels, const ChainSpec& spec, const svm::TrainConfig& cfg,
                       ChainTraining mode = ChainTraining::ground_truth);
ChainOutput cc_predict(const ClassifierChain& chain, const SparseVector& x);

// ---- Ensemble of Classifier Chains -----------------------------------------

struct ECCConfig {
  std::size_t n_chains = 10;
  double vote_threshold = 0.5;
  std::uint64_t seed = 1;
  bool bootstrap = true;
  // When set, every chain uses this order instead of a random permutation.
  std::optional<std::vector<LabelIndex>> fixed_order;

  void validate() const;
};

struct EnsembleChains {
  ECCConfig config;
  std::size_t n_labels = 0;
  std::vector<ClassifierChain> chains;
};

// Full-size resample with replacement.
std::vector<std::size_t> bootstrap_sample(std::size_t n, std::uint64_t seed);

// Per-chain order, bootstrap seed and base-learner seed, all derived from
// config.seed in chain order.
struct ChainPlan {
  ChainSpec spec;
  std::uint64_t svm_seed = 0;
};
std::vector<ChainPlan> plan_chains(const ECCConfig& config, std::size_t n_labels);

EnsembleChains ecc_fit(std::span<const SparseVector> X, std::span<const LabelSet> Y,
                       std::size_t n_labels, const ECCConfig& ecc, const svm::TrainConfig& cfg,
                       ChainTraining mode = ChainTraining::ground_truth, unsigned threads = 1);
// Scores are vote fractions; a label is included when its fraction reaches
// the vote threshold.
Prediction ecc_predict(const EnsembleChains& model, const SparseVector& x);

// ---- Fallback --------------------------------------------------------------

// Non-empty predictions pass through. An empty prediction becomes the
// singleton argmax of `scores`; ties go to the label more frequent in
// training, then to the lower label index. Empty `scores` means no scores
// are available and the most frequent label wins.
LabelSet force_min_one_label(const LabelSet& predicted, std::span<const double> scores,
                             std::span<const std::size_t> label_frequency);

// ---- Tagged model ----------------------------------------------------------

enum class Algorithm { br, lp, cc, ecc };

const char* to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

using MetaModel = std::variant<BinaryRelevance, LabelPowerset, ClassifierChain, EnsembleChains>;

Algorithm algorithm_of(const MetaModel& model);
Prediction predict(const MetaModel& model, const SparseVector& x);

}  // namespace survcode::multilabel
