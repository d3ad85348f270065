#include "survcode/multilabel.hpp"

#include <algorithm>
#include <map>

#include "survcode/error.hpp"
#include "survcode/parallel.hpp"
#include "survcode/rng.hpp"

namespace survcode::multilabel {
namespace {

void check_rows(std::span<const SparseVector> X, std::span<const LabelSet> Y,
                std::size_t n_labels) {
  if (X.size() != Y.size()) throw InvalidArgument("X and Y differ in length");
  if (X.empty()) throw InvalidArgument("empty training set");
  for (const auto& set : Y) {
    if (!set.empty() && set.items().back() >= n_labels) {
      throw InvalidArgument("label index outside the label space");
    }
  }
}

std::vector<int> binary_column(std::span<const LabelSet> Y, LabelIndex label) {
  std::vector<int> y(Y.size());
  for (std::size_t i = 0; i < Y.size(); ++i) y[i] = Y[i].contains(label) ? 1 : -1;
  return y;
}

}  // namespace

std::vector<std::size_t> label_frequencies(std::span<const LabelSet> Y, std::size_t n_labels) {
  std::vector<std::size_t> freq(n_labels, 0);
  for (const auto& set : Y) {
    for (LabelIndex label : set) ++freq.at(label);
  }
  return freq;
}

// ---- Binary Relevance ------------------------------------------------------

BinaryRelevance br_fit(std::span<const SparseVector> X, std::span<const LabelSet> Y,
                       std::size_t n_labels, const svm::TrainConfig& cfg, unsigned threads) {
  check_rows(X, Y, n_labels);
  BinaryRelevance model;
  model.n_labels = n_labels;
  model.models.resize(n_labels);
  parallel_for(n_labels, threads, [&](std::size_t label) {
    const auto y = binary_column(Y, static_cast<LabelIndex>(label));
    model.models[label] = svm::train_binary(X, y, cfg);
  });
  return model;
}

Prediction br_predict(const BinaryRelevance& model, const SparseVector& x) {
  Prediction out;
  out.scores.reserve(model.n_labels);
  for (std::size_t label = 0; label < model.n_labels; ++label) {
    const double margin = svm::decision(model.models[label], x);
    out.scores.push_back(margin);
    if (margin > 0.0) out.labels.insert(static_cast<LabelIndex>(label));
  }
  return out;
}

// ---- Label Powerset --------------------------------------------------------

LabelsetRegistry LabelsetRegistry::build(std::span<const LabelSet> Y) {
  std::map<LabelSet, std::size_t> counts;
  for (std::size_t i = 0; i < Y.size(); ++i) {
    if (Y[i].empty()) {
      throw DataError("label powerset: training row " + std::to_string(i) +
                      " has an empty labelset");
    }
    ++counts[Y[i]];
  }
  LabelsetRegistry registry;
  for (const auto& [set, count] : counts) {
    registry.sets.push_back(set);
    registry.frequencies.push_back(count);
  }
  return registry;
}

long LabelsetRegistry::index_of(const LabelSet& set) const {
  const auto it = std::lower_bound(sets.begin(), sets.end(), set);
  if (it == sets.end() || *it != set) return -1;
  return static_cast<long>(it - sets.begin());
}

LabelPowerset lp_fit(std::span<const SparseVector> X, std::span<const LabelSet> Y,
                     const svm::TrainConfig& cfg, unsigned threads) {
  if (X.size() != Y.size()) throw InvalidArgument("X and Y differ in length");
  LabelPowerset model;
  model.registry = LabelsetRegistry::build(Y);
  std::vector<int> classes(Y.size());
  for (std::size_t i = 0; i < Y.size(); ++i) {
    classes[i] = static_cast<int>(model.registry.index_of(Y[i]));
  }
  model.classifier = svm::train_multiclass(X, classes, cfg, threads);
  return model;
}

Prediction lp_predict(const LabelPowerset& model, const SparseVector& x) {
  const int cls = svm::predict_multiclass(model.classifier, x);
  return Prediction{model.registry.sets.at(static_cast<std::size_t>(cls)), {}};
}

// ---- Classifier Chains -----------------------------------------------------

void ChainSpec::validate(std::size_t n_labels) const {
  if (order.size() != n_labels) throw InvalidArgument("chain order length != label count");
  std::vector<bool> seen(n_labels, false);
  for (LabelIndex label : order) {
    if (label >= n_labels || seen[label]) {
      throw InvalidArgument("chain order is not a permutation of the label space");
    }
    seen[label] = true;
  }
}

const char* to_string(ChainTraining mode) {
  return mode == ChainTraining::ground_truth ? "ground_truth" : "predicted";
}

ChainTraining chain_training_from_string(const std::string& name) {
  if (name == "ground_truth") return ChainTraining::ground_truth;
  if (name == "predicted") return ChainTraining::predicted;
  throw InvalidArgument("unknown chain training mode '" + name + "'");
}

SparseVector chain_features(const SparseVector& x, std::span<const int> earlier) {
  SparseVector out = x;
  out.dim = x.dim + earlier.size();
  for (std::size_t m = 0; m < earlier.size(); ++m) {
    if (earlier[m] != 0) out.push(static_cast<std::uint32_t>(x.dim + m), 1.0);
  }
  return out;
}

ClassifierChain cc_fit(std::span<const SparseVector> X, std::span<const LabelSet> Y,
                       std::size_t n_labels, const ChainSpec& spec, const svm::TrainConfig& cfg,
                       ChainTraining mode) {
  check_rows(X, Y, n_labels);
  spec.validate(n_labels);
  ClassifierChain chain;
  chain.spec = spec;
  chain.feature_dim = X.front().dim;
  chain.models.reserve(n_labels);

  // earlier[i] holds the 0/1 values of the labels already in the chain.
  std::vector<std::vector<int>> earlier(X.size());
  std::vector<SparseVector> rows(X.size());
  for (std::size_t k = 0; k < n_labels; ++k) {
    const LabelIndex label = spec.order[k];
    for (std::size_t i = 0; i < X.size(); ++i) rows[i] = chain_features(X[i], earlier[i]);
    const auto y = binary_column(Y, label);
    chain.models.push_back(svm::train_binary(rows, y, cfg));
    for (std::size_t i = 0; i < X.size(); ++i) {
      const int value = mode == ChainTraining::ground_truth
                            ? (y[i] > 0 ? 1 : 0)
                            : (svm::decision(chain.models.back(), rows[i]) > 0.0 ? 1 : 0);
      earlier[i].push_back(value);
    }
  }
  return chain;
}

ChainOutput cc_predict(const ClassifierChain& chain, const SparseVector& x) {
  const std::size_t n_labels = chain.spec.order.size();
  ChainOutput out;
  out.binary.assign(n_labels, 0);
  out.margins.assign(n_labels, 0.0);
  std::vector<int> earlier;
  earlier.reserve(n_labels);
  for (std::size_t k = 0; k < n_labels; ++k) {
    const double margin = svm::decision(chain.models[k], chain_features(x, earlier));
    const int value = margin > 0.0 ? 1 : 0;
    const LabelIndex label = chain.spec.order[k];
    out.binary[label] = value;
    out.margins[label] = margin;
    if (value) out.labels.insert(label);
    earlier.push_back(value);
  }
  return out;
}

// ---- Ensemble of Classifier Chains -----------------------------------------

void ECCConfig::validate() const {
  if (n_chains == 0) throw InvalidArgument("n_chains must be positive");
  if (!(vote_threshold > 0.0 && vote_threshold <= 1.0)) {
    throw InvalidArgument("vote_threshold must lie in (0, 1]");
  }
}

std::vector<std::size_t> bootstrap_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> indices(n);
  for (auto& index : indices) index = rng.uniform_index(n);
  return indices;
}

std::vector<ChainPlan> plan_chains(const ECCConfig& config, std::size_t n_labels) {
  config.validate();
  Rng master(config.seed);
  std::vector<ChainPlan> plans;
  plans.reserve(config.n_chains);
  for (std::size_t c = 0; c < config.n_chains; ++c) {
    Rng chain_rng(master.next());
    ChainPlan plan;
    if (config.fixed_order) {
      plan.spec.order = *config.fixed_order;
    } else {
      for (std::size_t label : chain_rng.permutation(n_labels)) {
        plan.spec.order.push_back(static_cast<LabelIndex>(label));
      }
    }
    plan.spec.bootstrap_seed = chain_rng.next();
    plan.svm_seed = chain_rng.next();
    plan.spec.validate(n_labels);
    plans.push_back(std::move(plan));
  }
  return plans;
}

EnsembleChains ecc_fit(std::span<const SparseVector> X, std::span<const LabelSet> Y,
                       std::size_t n_labels, const ECCConfig& ecc, const svm::TrainConfig& cfg,
                       ChainTraining mode, unsigned threads) {
  check_rows(X, Y, n_labels);
  const auto plans = plan_chains(ecc, n_labels);
  EnsembleChains model;
  model.config = ecc;
  model.n_labels = n_labels;
  model.chains.resize(plans.size());
  parallel_for(plans.size(), threads, [&](std::size_t c) {
    svm::TrainConfig chain_cfg = cfg;
    chain_cfg.seed = plans[c].svm_seed;
    if (!ecc.bootstrap) {
      model.chains[c] = cc_fit(X, Y, n_labels, plans[c].spec, chain_cfg, mode);
      return;
    }
    const auto sample = bootstrap_sample(X.size(), plans[c].spec.bootstrap_seed);
    std::vector<SparseVector> Xb;
    std::vector<LabelSet> Yb;
    Xb.reserve(sample.size());
    Yb.reserve(sample.size());
    for (std::size_t i : sample) {
      Xb.push_back(X[i]);
      Yb.push_back(Y[i]);
    }
    model.chains[c] = cc_fit(Xb, Yb, n_labels, plans[c].spec, chain_cfg, mode);
  });
  return model;
}

Prediction ecc_predict(const EnsembleChains& model, const SparseVector& x) {
  std::vector<std::size_t> votes(model.n_labels, 0);
  for (const auto& chain : model.chains) {
    const auto out = cc_predict(chain, x);
    for (std::size_t label = 0; label < model.n_labels; ++label) votes[label] += out.binary[label];
  }
  Prediction pred;
  pred.scores.reserve(model.n_labels);
  const auto n = static_cast<double>(model.chains.size());
  for (std::size_t label = 0; label < model.n_labels; ++label) {
    const double fraction = static_cast<double>(votes[label]) / n;
    pred.scores.push_back(fraction);
    if (fraction >= model.config.vote_threshold) pred.labels.insert(static_cast<LabelIndex>(label));
  }
  return pred;
}

// ---- Fallback --------------------------------------------------------------

LabelSet force_min_one_label(const LabelSet& predicted, std::span<const double> scores,
                             std::span<const std::size_t> label_frequency) {
  if (!predicted.empty()) return predicted;
  const std::size_t n_labels = label_frequency.size();
  if (n_labels == 0) throw InvalidArgument("force_min_one_label: empty label space");
  if (!scores.empty() && scores.size() != n_labels) {
    throw InvalidArgument("force_min_one_label: scores do not cover the label space");
  }
  const auto score = [&](std::size_t label) { return scores.empty() ? 0.0 : scores[label]; };
  std::size_t best = 0;
  for (std::size_t label = 1; label < n_labels; ++label) {
    const double s = score(label);
    const double b = score(best);
    if (s > b || (s == b && label_frequency[label] > label_frequency[best])) best = label;
  }
  return LabelSet{static_cast<LabelIndex>(best)};
}

// ---- Tagged model ----------------------------------------------------------

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::br: return "br";
    case Algorithm::lp: return "lp";
    case Algorithm::cc: return "cc";
    case Algorithm::ecc: return "ecc";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "br") return Algorithm::br;
  if (name == "lp") return Algorithm::lp;
  if (name == "cc") return Algorithm::cc;
  if (name == "ecc") return Algorithm::ecc;
  throw InvalidArgument("unknown algorithm '" + name + "' (expected br, lp, cc or ecc)");
}

Algorithm algorithm_of(const MetaModel& model) {
  return static_cast<Algorithm>(model.index());
}

Prediction predict(const MetaModel& model, const SparseVector& x) {
  return std::visit(
      [&](const auto& m) -> Prediction {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BinaryRelevance>) {
          return br_predict(m, x);
        } else if constexpr (std::is_same_v<T, LabelPowerset>) {
          return lp_predict(m, x);
        } else if constexpr (std::is_same_v<T, ClassifierChain>) {
          auto out = cc_predict(m, x);
          return Prediction{std::move(out.labels), std::move(out.margins)};
        } else {
          return ecc_predict(m, x);
        }
      },
      model);
}

}  // namespace survcode::multilabel
