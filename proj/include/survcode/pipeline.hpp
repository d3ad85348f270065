#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survcode/bundle.hpp"
#include "survcode/config.hpp"
#include "survcode/dataset.hpp"
#include "survcode/eval.hpp"

namespace survcode::pipeline {

// Fits preprocessing-derived TF-IDF and the meta-algorithm on `train_ids`
// only. `svm_override` replaces the config's per-algorithm SVM settings.
ModelBundle train(const data::Dataset& dataset, std::span<const std::string> train_ids,
                  multilabel::Algorithm algorithm, const ToolkitConfig& config,
                  const std::optional<svm::TrainConfig>& svm_override = std::nullopt);

// Predictions for `ids`, in that order, with ground truth attached. With
// force_min_one, empty predictions are replaced via force_min_one_label and
// the model tag gets a "-min1" suffix.
std::vector<eval::PredictionRecord> predict(const ModelBundle& bundle, const data::Dataset& dataset,
                                            std::span<const std::string> ids, bool force_min_one,
                                            unsigned threads = 0);

// Applies the min-1-label fallback to imported or stored predictions and
// suffixes their model tags with "-min1".
void apply_force_min_one(std::vector<eval::PredictionRecord>& records,
                         std::span<const std::size_t> label_frequency);

struct GridCell {
  svm::TrainConfig config;
  double validation_loss = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;  // sorted by (C, gamma, kernel)
  std::size_t best = 0;

  const svm::TrainConfig& best_config() const { return cells.at(best).config; }
};

// Trains every cell on the training part and scores validation 0/1 loss.
// Ties go to smaller C, then smaller gamma, then linear before rbf.
GridResult grid_search(const data::Dataset& dataset, const data::Split& split,
                       multilabel::Algorithm algorithm, const ToolkitConfig& config);
std::string grid_to_json(const GridResult& result, multilabel::Algorithm algorithm);

struct ExperimentResult {
  ModelBundle bundle;
  std::vector<eval::PredictionRecord> predictions;
  eval::EvalReport report;
};

ExperimentResult run_experiment(const data::Dataset& dataset, const data::Split& split,
                                multilabel::Algorithm algorithm, const ToolkitConfig& config,
                                bool force_min_one);

struct TriageEntry {
  std::string id;
  LabelSet predicted;
  std::vector<double> scores;
};

// Singleton predictions are accepted automatically; empty and multi-label
// predictions are queued for manual coding.
struct TriageReport {
  std::vector<TriageEntry> automatic;
  std::vector<TriageEntry> manual;
  double auto_fraction = 0.0;
  std::optional<double> auto_zero_one;  // when every auto record has truth
};

TriageReport triage(std::span<const eval::PredictionRecord> records);
std::string triage_to_json(const TriageReport& report, const LabelSpace& space);

struct KappaResult {
  double label_level = 0.0;
  double answer_level = 0.0;
  std::size_t n_records = 0;
};

// Two codings of the same answers, matched by record id. The label space is
// the union of both codings' codes.
KappaResult kappa(const data::Dataset& coder1, const data::Dataset& coder2);

}  // namespace survcode::pipeline
