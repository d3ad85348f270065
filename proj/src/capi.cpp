#include <cstring>
#include <new>
#include <string>

#include "survcode/survcode.h"

#include "survcode/bundle.hpp"
#include "survcode/config.hpp"
#include "survcode/dataset.hpp"
#include "survcode/error.hpp"
#include "survcode/interchange.hpp"
#include "survcode/pipeline.hpp"

struct sc_config {
  survcode::ToolkitConfig value;
};

struct sc_dataset {
  survcode::data::Dataset value;
};

struct sc_split {
  survcode::data::Split value;
};

struct sc_model {
  survcode::ModelBundle value;
};

struct sc_predictions {
  std::vector<survcode::eval::PredictionRecord> records;
  survcode::LabelSpace space;
};

namespace {

thread_local std::string last_error;

sc_status fail(sc_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs fn and maps exceptions onto status codes.
template <typename Fn>
sc_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SC_OK;
  } catch (const survcode::InvalidArgument& e) {
    return fail(SC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const survcode::IoError& e) {
    return fail(SC_ERR_IO, e.what());
  } catch (const survcode::ParseError& e) {
    return fail(SC_ERR_PARSE, e.what());
  } catch (const survcode::DataError& e) {
    return fail(SC_ERR_DATA, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SC_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw survcode::InvalidArgument(std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const survcode::ToolkitConfig& config_or_default(const sc_config* config) {
  static const survcode::ToolkitConfig defaults = survcode::ToolkitConfig::defaults();
  return config ? config->value : defaults;
}

std::vector<std::string> part_ids(const sc_dataset* dataset, const sc_split* split, const std::string& part) {
  if (part == "all") return dataset->value.ids();
  require(split, "split");
  if (part == "train") return split->value.train;
  if (part == "validation") return split->value.validation;
  if (part == "test") return split->value.test;
  throw survcode::InvalidArgument("unknown part '" + part + "' (expected train, validation, test or all)");
}

}  // namespace

extern "C" {

const char* sc_version(void) { return "1.0.0"; }

const char* sc_last_error(void) { return last_error.c_str(); }

const char* sc_status_name(sc_status status) {
  switch (status) {
    case SC_OK: return "ok";
    case SC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SC_ERR_IO: return "io error";
    case SC_ERR_PARSE: return "parse error";
    case SC_ERR_DATA: return "data error";
    case SC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void sc_string_free(char* s) { std::free(s); }

sc_status sc_config_default(sc_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new sc_config{survcode::ToolkitConfig::defaults()};
  });
}

sc_status sc_config_load(const char* path, sc_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sc_config{survcode::load_config(path)};
  });
}

sc_status sc_config_set_seed(sc_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->value.set_seed(seed);
  });
}

sc_status sc_config_set_threads(sc_config* config, unsigned threads) {
  return guarded([&] {
    require(config, "config");
    config->value.threads = threads;
  });
}

sc_status sc_config_to_json(const sc_config* config, char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    *out_json = dup_string(survcode::config_to_json(config_or_default(config)));
  });
}

void sc_config_free(sc_config* config) { delete config; }

sc_status sc_dataset_load(const char* path, const sc_config* config, sc_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    survcode::data::DatasetSpec spec = config_or_default(config).dataset;
    spec.path = path;
    *out = new sc_dataset{survcode::data::load_dataset(spec)};
  });
}

size_t sc_dataset_size(const sc_dataset* dataset) { return dataset ? dataset->value.size() : 0; }

size_t sc_dataset_label_count(const sc_dataset* dataset) {
  return dataset ? dataset->value.space().size() : 0;
}

sc_status sc_dataset_stats(const sc_dataset* dataset, char** out_json, char** out_text) {
  return guarded([&] {
    require(dataset, "dataset");
    const auto stats = survcode::data::dataset_stats(dataset->value);
    if (out_json) *out_json = dup_string(survcode::data::stats_to_json(stats));
    if (out_text) *out_text = dup_string(survcode::data::format_stats(stats));
  });
}

void sc_dataset_free(sc_dataset* dataset) { delete dataset; }

sc_status sc_split_create(const sc_dataset* dataset, const sc_config* config, sc_split** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out, "out");
    *out = new sc_split{survcode::data::make_split(dataset->value, config_or_default(config).split)};
  });
}

sc_status sc_split_load(const char* path, const sc_dataset* dataset, sc_split** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto split = survcode::data::read_split(path);
    if (dataset) survcode::data::check_split(split, dataset->value);
    *out = new sc_split{std::move(split)};
  });
}

sc_status sc_split_save(const sc_split* split, const char* path) {
  return guarded([&] {
    require(split, "split");
    require(path, "path");
    survcode::data::write_split(path, split->value);
  });
}

sc_status sc_split_sizes(const sc_split* split, size_t* train, size_t* validation, size_t* test) {
  return guarded([&] {
    require(split, "split");
    if (train) *train = split->value.train.size();
    if (validation) *validation = split->value.validation.size();
    if (test) *test = split->value.test.size();
  });
}

void sc_split_free(sc_split* split) { delete split; }

sc_status sc_gridsearch(const sc_dataset* dataset, const sc_split* split, const char* algorithm,
                        const sc_config* config, char** out_json) {
  return guarded([&] {
    require(dataset, "dataset");
    require(split, "split");
    require(algorithm, "algorithm");
    require(out_json, "out_json");
    const auto alg = survcode::multilabel::algorithm_from_string(algorithm);
    const auto result = survcode::pipeline::grid_search(dataset->value, split->value, alg, config_or_default(config));
    *out_json = dup_string(survcode::pipeline::grid_to_json(result, alg));
  });
}

sc_status sc_model_train(const sc_dataset* dataset, const sc_split* split, const char* algorithm,
                         const sc_config* config, sc_model** out) {
  return guarded([&] {
    require(dataset, "dataset");
    require(split, "split");
    require(algorithm, "algorithm");
    require(out, "out");
    const auto alg = survcode::multilabel::algorithm_from_string(algorithm);
    *out = new sc_model{
        survcode::pipeline::train(dataset->value, split->value.train, alg, config_or_default(config))};
  });
}

sc_status sc_model_save(const sc_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    survcode::save_bundle(path, model->value);
  });
}

sc_status sc_model_load(const char* path, sc_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sc_model{survcode::load_bundle(path)};
  });
}

const char* sc_model_algorithm(const sc_model* model) {
  return model ? survcode::multilabel::to_string(model->value.algorithm()) : "";
}

void sc_model_free(sc_model* model) { delete model; }

sc_status sc_model_predict(const sc_model* model, const sc_dataset* dataset, const sc_split* split,
                           const char* part, int force_min_one, const sc_config* config, sc_predictions** out) {
  return guarded([&] {
    require(model, "model");
    require(dataset, "dataset");
    require(part, "part");
    require(out, "out");
    const auto ids = part_ids(dataset, split, part);
    auto records = survcode::pipeline::predict(model->value, dataset->value, ids, force_min_one != 0,
                                               config_or_default(config).threads);
    *out = new sc_predictions{std::move(records), model->value.space};
  });
}

sc_status sc_predictions_import(const char* path, const sc_dataset* dataset, sc_predictions** out) {
  return guarded([&] {
    require(path, "path");
    require(dataset, "dataset");
    require(out, "out");
    auto records = survcode::interchange::import_predictions(path, dataset->value.space());
    *out = new sc_predictions{std::move(records), dataset->value.space()};
  });
}

sc_status sc_predictions_write(const sc_predictions* predictions, const char* path) {
  return guarded([&] {
    require(predictions, "predictions");
    require(path, "path");
    survcode::interchange::write_predictions(path, predictions->records, predictions->space);
  });
}

size_t sc_predictions_size(const sc_predictions* predictions) {
  return predictions ? predictions->records.size() : 0;
}

size_t sc_predictions_empty_count(const sc_predictions* predictions) {
  if (!predictions) return 0;
  size_t n = 0;
  for (const auto& r : predictions->records) n += r.predicted.empty() ? 1 : 0;
  return n;
}

sc_status sc_predictions_force_min_one(sc_predictions* predictions, const sc_dataset* dataset,
                                       const sc_split* split) {
  return guarded([&] {
    require(predictions, "predictions");
    require(dataset, "dataset");
    if (!(dataset->value.space() == predictions->space)) {
      throw survcode::DataError("dataset label space differs from the predictions' label space");
    }
    std::vector<survcode::LabelSet> Y;
    const auto ids = split ? split->value.train : dataset->value.ids();
    for (const auto& id : ids) Y.push_back(dataset->value.at(id).labels);
    const auto freq = survcode::multilabel::label_frequencies(Y, predictions->space.size());
    survcode::pipeline::apply_force_min_one(predictions->records, freq);
    for (auto& r : predictions->records) {
      if (r.model_tag.size() < 5 || r.model_tag.compare(r.model_tag.size() - 5, 5, "-min1") != 0) {
        r.model_tag += "-min1";
      }
    }
  });
}

void sc_predictions_free(sc_predictions* predictions) { delete predictions; }

sc_status sc_evaluate(const sc_predictions* predictions, const sc_dataset* dataset, double* zero_one,
                      double* hamming, char** out_json, char** out_table) {
  return guarded([&] {
    require(predictions, "predictions");
    require(dataset, "dataset");
    if (!(dataset->value.space() == predictions->space)) {
      throw survcode::DataError("dataset label space differs from the predictions' label space");
    }
    auto records = predictions->records;
    survcode::interchange::attach_truth(records, dataset->value);
    const auto report = survcode::eval::evaluate(records, dataset->value.space().size());
    if (zero_one) *zero_one = report.zero_one;
    if (hamming) *hamming = report.hamming;
    if (out_json) *out_json = dup_string(survcode::eval::report_to_json(report));
    if (out_table) *out_table = dup_string(survcode::eval::format_tables(std::span(&report, 1)));
  });
}

sc_status sc_triage(const sc_predictions* predictions, const sc_dataset* dataset, double* auto_fraction,
                    char** out_json) {
  return guarded([&] {
    require(predictions, "predictions");
    auto records = predictions->records;
    if (dataset) survcode::interchange::attach_truth(records, dataset->value);
    const auto report = survcode::pipeline::triage(records);
    if (auto_fraction) *auto_fraction = report.auto_fraction;
    if (out_json) *out_json = dup_string(survcode::pipeline::triage_to_json(report, predictions->space));
  });
}

sc_status sc_kappa(const sc_dataset* coder1, const sc_dataset* coder2, double* label_level, double* answer_level) {
  return guarded([&] {
    require(coder1, "coder1");
    require(coder2, "coder2");
    const auto result = survcode::pipeline::kappa(coder1->value, coder2->value);
    if (label_level) *label_level = result.label_level;
    if (answer_level) *answer_level = result.answer_level;
  });
}

}  // extern "C"
