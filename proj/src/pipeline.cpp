#include "survcode/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "json.hpp"
#include "survcode/error.hpp"
#include "survcode/parallel.hpp"
#include "survcode/rng.hpp"

namespace survcode::pipeline {
namespace {

using multilabel::Algorithm;

std::vector<textprep::Document> documents(const textprep::Preprocessor& prep, const data::Dataset& dataset,
                                          std::span<const std::string> ids) {
  std::vector<textprep::Document> docs;
  docs.reserve(ids.size());
  for (const auto& id : ids) {
    const auto& record = dataset.at(id);
    docs.push_back(prep.process({record.id, record.text}));
  }
  return docs;
}

std::string tag_for(Algorithm algorithm, bool force_min_one) {
  std::string tag = multilabel::to_string(algorithm);
  if (force_min_one) tag += "-min1";
  return tag;
}

}  // namespace

ModelBundle train(const data::Dataset& dataset, std::span<const std::string> train_ids, Algorithm algorithm,
                  const ToolkitConfig& config, const std::optional<svm::TrainConfig>& svm_override) {
  if (train_ids.empty()) throw InvalidArgument("empty training corpus");
  ModelBundle bundle;
  bundle.rules = config.rules;
  if (config.lemmatizer_path) bundle.lemmatizer = textprep::Lemmatizer::from_file(*config.lemmatizer_path);
  const textprep::Preprocessor prep(bundle.rules, bundle.lemmatizer);
  const auto docs = documents(prep, dataset, train_ids);
  bundle.tfidf = features::TfidfModel::fit(docs, config.features);
  const auto X = bundle.tfidf.transform(docs);

  std::vector<LabelSet> Y;
  Y.reserve(train_ids.size());
  for (const auto& id : train_ids) Y.push_back(dataset.at(id).labels);
  const std::size_t n_labels = dataset.space().size();
  bundle.space = dataset.space();
  bundle.label_frequency = multilabel::label_frequencies(Y, n_labels);
  bundle.svm = svm_override ? *svm_override : config.svm_for(algorithm);
  bundle.svm.seed = config.seed;
  bundle.chain_training = config.chain_training;
  bundle.seed = config.seed;

  switch (algorithm) {
    case Algorithm::br:
      bundle.model = multilabel::br_fit(X, Y, n_labels, bundle.svm, config.threads);
      break;
    case Algorithm::lp:
      bundle.model = multilabel::lp_fit(X, Y, bundle.svm, config.threads);
      break;
    case Algorithm::cc: {
      multilabel::ChainSpec spec;
      if (config.random_chain_order) {
        Rng rng(config.seed);
        for (std::size_t label : rng.permutation(n_labels)) spec.order.push_back(static_cast<LabelIndex>(label));
      } else {
        for (std::size_t label = 0; label < n_labels; ++label) spec.order.push_back(static_cast<LabelIndex>(label));
      }
      bundle.model = multilabel::cc_fit(X, Y, n_labels, spec, bundle.svm, config.chain_training);
      break;
    }
    case Algorithm::ecc: {
      multilabel::ECCConfig ecc = config.ecc;
      ecc.seed = config.seed;
      bundle.model = multilabel::ecc_fit(X, Y, n_labels, ecc, bundle.svm, config.chain_training, config.threads);
      break;
    }
  }
  return bundle;
}

std::vector<eval::PredictionRecord> predict(const ModelBundle& bundle, const data::Dataset& dataset,
                                            std::span<const std::string> ids, bool force_min_one,
                                            unsigned threads) {
  if (!(dataset.space() == bundle.space)) {
    throw DataError("dataset label space differs from the model's label space");
  }
  const textprep::Preprocessor prep(bundle.rules, bundle.lemmatizer);
  const std::string tag = tag_for(bundle.algorithm(), force_min_one);
  std::vector<eval::PredictionRecord> records(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    const auto& record = dataset.at(ids[i]);
    const auto x = bundle.tfidf.transform(prep.process({record.id, record.text}));
    auto pred = multilabel::predict(bundle.model, x);
    auto& out = records[i];
    out.id = record.id;
    out.model_tag = tag;
    out.truth = record.labels;
    if (force_min_one) {
      out.predicted = multilabel::force_min_one_label(pred.labels, pred.scores, bundle.label_frequency);
    } else {
      out.predicted = std::move(pred.labels);
    }
    out.scores = std::move(pred.scores);
  });
  return records;
}

void apply_force_min_one(std::vector<eval::PredictionRecord>& records,
                         std::span<const std::size_t> label_frequency) {
  for (auto& r : records) {
    r.predicted = multilabel::force_min_one_label(r.predicted, r.scores, label_frequency);
    if (!r.model_tag.ends_with("-min1")) r.model_tag += "-min1";
  }
}

GridResult grid_search(const data::Dataset& dataset, const data::Split& split, Algorithm algorithm,
                       const ToolkitConfig& config) {
  config.grid.validate();
  GridResult result;
  const svm::TrainConfig base = config.svm_for(algorithm);
  for (svm::Kernel kernel : config.grid.kernels) {
    for (double c : config.grid.C) {
      if (kernel == svm::Kernel::linear) {
        svm::TrainConfig cell = base;
        cell.kernel = kernel;
        cell.C = c;
        cell.gamma.reset();
        result.cells.push_back({cell, 0.0});
      } else {
        for (double g : config.grid.gamma) {
          svm::TrainConfig cell = base;
          cell.kernel = kernel;
          cell.C = c;
          cell.gamma = g;
          result.cells.push_back({cell, 0.0});
        }
      }
    }
  }
  std::stable_sort(result.cells.begin(), result.cells.end(), [](const GridCell& a, const GridCell& b) {
    const double ga = a.config.gamma.value_or(-std::numeric_limits<double>::infinity());
    const double gb = b.config.gamma.value_or(-std::numeric_limits<double>::infinity());
    if (a.config.C != b.config.C) return a.config.C < b.config.C;
    if (ga != gb) return ga < gb;
    return a.config.kernel == svm::Kernel::linear && b.config.kernel == svm::Kernel::rbf;
  });

  // Cells run in parallel; each trains single-threaded.
  ToolkitConfig inner = config;
  inner.threads = 1;
  parallel_for(result.cells.size(), config.threads, [&](std::size_t k) {
    const auto bundle = train(dataset, split.train, algorithm, inner, result.cells[k].config);
    const auto preds = predict(bundle, dataset, split.validation, false, 1);
    result.cells[k].validation_loss = eval::zero_one_loss(preds);
  });
  for (std::size_t k = 1; k < result.cells.size(); ++k) {
    if (result.cells[k].validation_loss < result.cells[result.best].validation_loss) result.best = k;
  }
  return result;
}

std::string grid_to_json(const GridResult& result, Algorithm algorithm) {
  nlohmann::ordered_json j;
  j["algorithm"] = multilabel::to_string(algorithm);
  const auto cell_json = [](const GridCell& cell) {
    nlohmann::ordered_json c;
    c["kernel"] = svm::to_string(cell.config.kernel);
    c["C"] = cell.config.C;
    c["gamma"] = cell.config.gamma ? nlohmann::ordered_json(*cell.config.gamma) : nlohmann::ordered_json(nullptr);
    c["validation_zero_one_loss"] = cell.validation_loss;
    return c;
  };
  j["best"] = cell_json(result.cells.at(result.best));
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& cell : result.cells) j["cells"].push_back(cell_json(cell));
  return j.dump(2);
}

ExperimentResult run_experiment(const data::Dataset& dataset, const data::Split& split, Algorithm algorithm,
                                const ToolkitConfig& config, bool force_min_one) {
  data::check_split(split, dataset);
  ExperimentResult result;
  result.bundle = train(dataset, split.train, algorithm, config);
  result.predictions = predict(result.bundle, dataset, split.test, force_min_one, config.threads);
  result.report = eval::evaluate(result.predictions, dataset.space().size());
  return result;
}

TriageReport triage(std::span<const eval::PredictionRecord> records) {
  TriageReport report;
  bool all_truth = true;
  std::vector<eval::PredictionRecord> auto_records;
  for (const auto& r : records) {
    TriageEntry entry{r.id, r.predicted, r.scores};
    if (r.predicted.size() == 1) {
      report.automatic.push_back(std::move(entry));
      auto_records.push_back(r);
      all_truth = all_truth && r.truth.has_value();
    } else {
      report.manual.push_back(std::move(entry));
    }
  }
  if (!records.empty()) {
    report.auto_fraction = static_cast<double>(report.automatic.size()) / static_cast<double>(records.size());
  }
  if (all_truth && !auto_records.empty()) report.auto_zero_one = eval::zero_one_loss(auto_records);
  return report;
}

std::string triage_to_json(const TriageReport& report, const LabelSpace& space) {
  nlohmann::ordered_json j;
  const std::size_t total = report.automatic.size() + report.manual.size();
  j["n_records"] = total;
  j["auto_fraction"] = report.auto_fraction;
  j["auto_zero_one_loss"] =
      report.auto_zero_one ? nlohmann::ordered_json(*report.auto_zero_one) : nlohmann::ordered_json(nullptr);
  j["automatic"] = nlohmann::ordered_json::array();
  for (const auto& e : report.automatic) {
    j["automatic"].push_back({{"id", e.id}, {"label", space.code(e.predicted.items().front())}});
  }
  j["manual"] = nlohmann::ordered_json::array();
  for (const auto& e : report.manual) {
    nlohmann::ordered_json m;
    m["id"] = e.id;
    m["predicted"] = to_codes(e.predicted, space);
    if (!e.scores.empty()) {
      nlohmann::ordered_json scores = nlohmann::ordered_json::object();
      for (std::size_t label = 0; label < e.scores.size(); ++label) {
        if (std::isfinite(e.scores[label])) scores[space.code(static_cast<LabelIndex>(label))] = e.scores[label];
      }
      m["scores"] = scores;
    }
    j["manual"].push_back(m);
  }
  return j.dump(2);
}

KappaResult kappa(const data::Dataset& coder1, const data::Dataset& coder2) {
  if (coder1.size() != coder2.size()) throw DataError("codings cover different numbers of records");
  std::vector<std::string> codes = coder1.space().codes();
  codes.insert(codes.end(), coder2.space().codes().begin(), coder2.space().codes().end());
  const LabelSpace space = LabelSpace::from_observed(codes);
  const auto remap = [&](const LabelSet& set, const LabelSpace& from) {
    LabelSet out;
    for (LabelIndex label : set) out.insert(space.index_of(from.code(label)));
    return out;
  };
  std::vector<LabelSet> a;
  std::vector<LabelSet> b;
  for (const auto& r : coder1.records()) {
    if (!coder2.contains(r.id)) throw DataError("record '" + r.id + "' missing from the second coding");
    a.push_back(remap(r.labels, coder1.space()));
    b.push_back(remap(coder2.at(r.id).labels, coder2.space()));
  }
  return {eval::kappa_label_level(a, b, space.size()), eval::kappa_answer_level(a, b), a.size()};
}

}  // namespace survcode::pipeline
