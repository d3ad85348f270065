// Command-line front end. Talks to the library exclusively through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "survcode/survcode.h"

namespace {

struct Failure {
  sc_status status;
};

void check(sc_status status) {
  if (status != SC_OK) throw Failure{status};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using Config = std::unique_ptr<sc_config, Deleter<sc_config, sc_config_free>>;
using Dataset = std::unique_ptr<sc_dataset, Deleter<sc_dataset, sc_dataset_free>>;
using Split = std::unique_ptr<sc_split, Deleter<sc_split, sc_split_free>>;
using Model = std::unique_ptr<sc_model, Deleter<sc_model, sc_model_free>>;
using Predictions = std::unique_ptr<sc_predictions, Deleter<sc_predictions, sc_predictions_free>>;

// Takes ownership of a C string from the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  sc_string_free(s);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "cannot write '" << path << "'\n";
    throw Failure{SC_ERR_IO};
  }
  out << text << '\n';
}

Dataset load_dataset(const std::string& path, const sc_config* config) {
  sc_dataset* raw = nullptr;
  check(sc_dataset_load(path.c_str(), config, &raw));
  return Dataset(raw);
}

Split load_split(const std::string& path, const sc_dataset* dataset) {
  sc_split* raw = nullptr;
  check(sc_split_load(path.c_str(), dataset, &raw));
  return Split(raw);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survcode: multi-label coding of open-ended survey answers"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed, "Seed for splitting, base learners and ECC");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.set_version_flag("--version", std::string(sc_version()));

  std::string data_path;
  std::string split_path;
  std::string out_path;
  std::string algorithm;
  std::string model_path;
  std::string predictions_path;
  std::string part = "test";
  std::string json_path;
  std::string coder2_path;
  bool force_min_one = false;
  bool as_json = false;

  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("--data", data_path, "Dataset CSV")->required();
  stats->add_flag("--json", as_json, "Print JSON instead of a table");

  auto* split = app.add_subcommand("split", "Seeded train/validation/test split");
  split->add_option("--data", data_path, "Dataset CSV")->required();
  split->add_option("--out", out_path, "Split file to write")->required();

  const auto algorithms = CLI::IsMember({"br", "lp", "cc", "ecc"});

  auto* grid = app.add_subcommand("gridsearch", "Grid search over C/gamma by validation 0/1 loss");
  grid->add_option("--data", data_path, "Dataset CSV")->required();
  grid->add_option("--split", split_path, "Split file")->required();
  grid->add_option("--algorithm", algorithm, "br, lp, cc or ecc")->required()->check(algorithms);
  grid->add_option("--out", out_path, "Write the grid results here");

  auto* train = app.add_subcommand("train", "Fit a model on the training part");
  train->add_option("--data", data_path, "Dataset CSV")->required();
  train->add_option("--split", split_path, "Split file")->required();
  train->add_option("--algorithm", algorithm, "br, lp, cc or ecc")->required()->check(algorithms);
  train->add_option("--out", out_path, "Model bundle to write")->required();

  auto* predict = app.add_subcommand("predict", "Predict a split part into an interchange file");
  predict->add_option("--model", model_path, "Model bundle")->required();
  predict->add_option("--data", data_path, "Dataset CSV")->required();
  predict->add_option("--split", split_path, "Split file (required unless --part all)");
  predict->add_option("--part", part, "train, validation, test or all")
      ->check(CLI::IsMember({"train", "validation", "test", "all"}));
  predict->add_option("--out", out_path, "Interchange file to write")->required();
  predict->add_flag("--force-min-one", force_min_one, "Replace empty predictions by the top-scoring label");

  auto* evaluate = app.add_subcommand("evaluate", "Score an interchange file against the dataset");
  evaluate->add_option("--predictions", predictions_path, "Interchange file")->required();
  evaluate->add_option("--data", data_path, "Dataset CSV with ground truth")->required();
  evaluate->add_option("--json", json_path, "Also write the report as JSON");

  auto* triage = app.add_subcommand("triage", "Split predictions into automatic and manual coding");
  triage->add_option("--predictions", predictions_path, "Interchange file")->required();
  triage->add_option("--data", data_path, "Dataset CSV (label space; truth for the auto-subset loss)")
      ->required();
  triage->add_option("--out", out_path, "Triage report to write");

  auto* import_eval = app.add_subcommand("import-eval", "Validate and score externally produced predictions");
  import_eval->add_option("--predictions", predictions_path, "Interchange file")->required();
  import_eval->add_option("--data", data_path, "Dataset CSV with ground truth")->required();
  import_eval->add_option("--split", split_path, "Split file; training part supplies label frequencies");
  import_eval->add_flag("--force-min-one", force_min_one, "Apply the min-1-label fallback before scoring");
  import_eval->add_option("--json", json_path, "Also write the report as JSON");

  auto* kappa = app.add_subcommand("kappa", "Inter-rater agreement between two codings");
  kappa->add_option("--data", data_path, "First coding (CSV)")->required();
  kappa->add_option("--coder2", coder2_path, "Second coding (CSV)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    sc_config* raw_config = nullptr;
    if (config_path.empty()) {
      check(sc_config_default(&raw_config));
    } else {
      check(sc_config_load(config_path.c_str(), &raw_config));
    }
    Config config(raw_config);
    if (seed) check(sc_config_set_seed(config.get(), *seed));
    if (threads) check(sc_config_set_threads(config.get(), *threads));

    if (stats->parsed()) {
      auto dataset = load_dataset(data_path, config.get());
      char* json = nullptr;
      char* text = nullptr;
      check(sc_dataset_stats(dataset.get(), &json, &text));
      const std::string json_s = take(json);
      const std::string text_s = take(text);
      std::cout << (as_json ? json_s + "\n" : text_s);
    } else if (split->parsed()) {
      auto dataset = load_dataset(data_path, config.get());
      sc_split* raw = nullptr;
      check(sc_split_create(dataset.get(), config.get(), &raw));
      Split s(raw);
      check(sc_split_save(s.get(), out_path.c_str()));
      std::size_t n_train = 0, n_val = 0, n_test = 0;
      check(sc_split_sizes(s.get(), &n_train, &n_val, &n_test));
      std::cout << "train " << n_train << ", validation " << n_val << ", test " << n_test << '\n';
    } else if (grid->parsed()) {
      auto dataset = load_dataset(data_path, config.get());
      auto s = load_split(split_path, dataset.get());
      char* json = nullptr;
      check(sc_gridsearch(dataset.get(), s.get(), algorithm.c_str(), config.get(), &json));
      const std::string result = take(json);
      if (!out_path.empty()) write_text(out_path, result);
      std::cout << result << '\n';
    } else if (train->parsed()) {
      auto dataset = load_dataset(data_path, config.get());
      auto s = load_split(split_path, dataset.get());
      sc_model* raw = nullptr;
      check(sc_model_train(dataset.get(), s.get(), algorithm.c_str(), config.get(), &raw));
      Model model(raw);
      check(sc_model_save(model.get(), out_path.c_str()));
    } else if (predict->parsed()) {
      sc_model* raw_model = nullptr;
      check(sc_model_load(model_path.c_str(), &raw_model));
      Model model(raw_model);
      auto dataset = load_dataset(data_path, config.get());
      Split s;
      if (!split_path.empty()) s = load_split(split_path, dataset.get());
      sc_predictions* raw = nullptr;
      check(sc_model_predict(model.get(), dataset.get(), s.get(), part.c_str(), force_min_one ? 1 : 0,
                             config.get(), &raw));
      Predictions preds(raw);
      check(sc_predictions_write(preds.get(), out_path.c_str()));
    } else if (evaluate->parsed() || import_eval->parsed()) {
      auto dataset = load_dataset(data_path, config.get());
      sc_predictions* raw = nullptr;
      check(sc_predictions_import(predictions_path.c_str(), dataset.get(), &raw));
      Predictions preds(raw);
      if (import_eval->parsed()) {
        std::cerr << "imported " << sc_predictions_size(preds.get()) << " records, "
                  << sc_predictions_empty_count(preds.get()) << " with no predicted label\n";
        if (force_min_one) {
          Split s;
          if (!split_path.empty()) s = load_split(split_path, dataset.get());
          check(sc_predictions_force_min_one(preds.get(), dataset.get(), s.get()));
        }
      }
      char* json = nullptr;
      char* table = nullptr;
      check(sc_evaluate(preds.get(), dataset.get(), nullptr, nullptr, &json, &table));
      const std::string json_s = take(json);
      std::cout << take(table);
      if (!json_path.empty()) write_text(json_path, json_s);
    } else if (triage->parsed()) {
      auto dataset = load_dataset(data_path, config.get());
      sc_predictions* raw = nullptr;
      check(sc_predictions_import(predictions_path.c_str(), dataset.get(), &raw));
      Predictions preds(raw);
      double auto_fraction = 0.0;
      char* json = nullptr;
      check(sc_triage(preds.get(), dataset.get(), &auto_fraction, &json));
      const std::string report = take(json);
      if (!out_path.empty()) write_text(out_path, report);
      std::printf("automatic %.3f, manual %.3f\n", auto_fraction, 1.0 - auto_fraction);
    } else if (kappa->parsed()) {
      auto first = load_dataset(data_path, config.get());
      auto second = load_dataset(coder2_path, config.get());
      double label_level = 0.0;
      double answer_level = 0.0;
      check(sc_kappa(first.get(), second.get(), &label_level, &answer_level));
      std::printf("kappa (label level)  %.4f\nkappa (answer level) %.4f\n", label_level, answer_level);
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << sc_status_name(f.status) << "): " << sc_last_error() << '\n';
    return static_cast<int>(f.status);
  }
  return 0;
}
