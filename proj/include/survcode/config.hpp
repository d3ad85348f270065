#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survcode/dataset.hpp"
#include "survcode/features.hpp"
#include "survcode/multilabel.hpp"
#include "survcode/svm.hpp"
#include "survcode/textprep.hpp"

namespace survcode {

// Grid-search candidates. Cells are linear x C plus rbf x C x gamma.
struct GridSpec {
  std::vector<svm::Kernel> kernels = {svm::Kernel::linear, svm::Kernel::rbf};
  std::vector<double> C = {0.1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<double> gamma = {0.01, 0.1, 0.5, 1.0};

  void validate() const;
};

// Everything a run needs besides file paths. Loaded from a JSON document;
// keys that are absent keep their defaults, unknown keys are rejected.
struct ToolkitConfig {
  std::uint64_t seed = 1;
  data::DatasetSpec dataset;
  textprep::NormalizationRules rules = textprep::NormalizationRules::defaults();
  std::optional<std::string> lemmatizer_path;
  features::TfidfOptions features;
  svm::TrainConfig svm;
  std::map<multilabel::Algorithm, svm::TrainConfig> svm_overrides;
  multilabel::ECCConfig ecc;
  multilabel::ChainTraining chain_training = multilabel::ChainTraining::ground_truth;
  bool random_chain_order = false;  // single-chain CC only
  GridSpec grid;
  data::SplitConfig split;
  bool force_min_one = false;
  unsigned threads = 0;

  // Linear C=100 for every algorithm except LP, which uses rbf C=100,
  // gamma=0.5.
  static ToolkitConfig defaults();

  svm::TrainConfig svm_for(multilabel::Algorithm algorithm) const;
  // Propagates one seed to the split, the base learners and the ensemble.
  void set_seed(std::uint64_t value);
  void validate() const;
};

ToolkitConfig parse_config(const std::string& json_text);
ToolkitConfig load_config(const std::string& path);
std::string config_to_json(const ToolkitConfig& config);

}  // namespace survcode
