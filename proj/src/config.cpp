#include "survcode/config.hpp"

#include <set>

#include "json.hpp"
#include "survcode/error.hpp"
#include "survcode/io.hpp"

namespace survcode {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& section) {
  if (!obj.is_object()) throw ParseError("config: '" + section + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ParseError("config: unknown key '" + section + "." + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

char read_char(const json& obj, const char* key, char fallback) {
  if (!obj.contains(key)) return fallback;
  const auto s = obj.at(key).get<std::string>();
  if (s.size() != 1) throw ParseError(std::string("config: '") + key + "' must be one character");
  return s[0];
}

void read_svm(const json& obj, svm::TrainConfig& cfg, const std::string& section) {
  reject_unknown(obj, {"kernel", "C", "gamma", "tolerance", "max_iterations", "cache_megabytes"}, section);
  if (obj.contains("kernel")) cfg.kernel = svm::kernel_from_string(obj.at("kernel").get<std::string>());
  read(obj, "C", cfg.C);
  if (obj.contains("gamma")) {
    if (obj.at("gamma").is_null()) {
      cfg.gamma.reset();
    } else {
      cfg.gamma = obj.at("gamma").get<double>();
    }
  }
  read(obj, "tolerance", cfg.tolerance);
  read(obj, "max_iterations", cfg.max_iterations);
  read(obj, "cache_megabytes", cfg.cache_megabytes);
}

json svm_json(const svm::TrainConfig& cfg) {
  json j;
  j["kernel"] = svm::to_string(cfg.kernel);
  j["C"] = cfg.C;
  j["gamma"] = cfg.gamma ? json(*cfg.gamma) : json(nullptr);
  j["tolerance"] = cfg.tolerance;
  j["max_iterations"] = cfg.max_iterations;
  j["cache_megabytes"] = cfg.cache_megabytes;
  return j;
}

}  // namespace

void GridSpec::validate() const {
  if (kernels.empty() || C.empty()) throw InvalidArgument("grid: kernels and C must be nonempty");
  for (double c : C) {
    if (!(c > 0.0)) throw InvalidArgument("grid: C candidates must be positive");
  }
  const bool has_rbf = std::find(kernels.begin(), kernels.end(), svm::Kernel::rbf) != kernels.end();
  if (has_rbf && gamma.empty()) throw InvalidArgument("grid: rbf requires gamma candidates");
  for (double g : gamma) {
    if (!(g > 0.0)) throw InvalidArgument("grid: gamma candidates must be positive");
  }
}

ToolkitConfig ToolkitConfig::defaults() {
  ToolkitConfig cfg;
  svm::TrainConfig lp = cfg.svm;
  lp.kernel = svm::Kernel::rbf;
  lp.gamma = 0.5;
  cfg.svm_overrides[multilabel::Algorithm::lp] = lp;
  return cfg;
}

svm::TrainConfig ToolkitConfig::svm_for(multilabel::Algorithm algorithm) const {
  const auto it = svm_overrides.find(algorithm);
  svm::TrainConfig cfg = it == svm_overrides.end() ? svm : it->second;
  cfg.seed = seed;
  return cfg;
}

void ToolkitConfig::set_seed(std::uint64_t value) {
  seed = value;
  split.seed = value;
  svm.seed = value;
  ecc.seed = value;
  for (auto& [algorithm, cfg] : svm_overrides) cfg.seed = value;
}

void ToolkitConfig::validate() const {
  rules.validate();
  if (features.ngram_range.min_n < 1 || features.ngram_range.max_n < features.ngram_range.min_n) {
    throw InvalidArgument("features: invalid ngram range");
  }
  svm.validate();
  for (const auto& [algorithm, cfg] : svm_overrides) cfg.validate();
  ecc.validate();
  grid.validate();
  split.validate();
}

ToolkitConfig parse_config(const std::string& json_text) {
  ToolkitConfig cfg = ToolkitConfig::defaults();
  try {
    const json root = json::parse(json_text);
    reject_unknown(root,
                   {"seed", "dataset", "textprep", "features", "svm", "svm_overrides", "ecc", "chain",
                    "grid", "split", "force_min_one", "threads"},
                   "root");
    if (root.contains("dataset")) {
      const auto& d = root.at("dataset");
      reject_unknown(d, {"id_column", "text_column", "labels_column", "label_delimiter", "field_delimiter",
                         "label_codes"},
                     "dataset");
      read(d, "id_column", cfg.dataset.id_column);
      read(d, "text_column", cfg.dataset.text_column);
      read(d, "labels_column", cfg.dataset.labels_column);
      cfg.dataset.label_delimiter = read_char(d, "label_delimiter", cfg.dataset.label_delimiter);
      cfg.dataset.field_delimiter = read_char(d, "field_delimiter", cfg.dataset.field_delimiter);
      read(d, "label_codes", cfg.dataset.label_codes);
    }
    if (root.contains("textprep")) {
      const auto& t = root.at("textprep");
      reject_unknown(t, {"fold_umlauts", "drop_single_letters", "drop_numbers", "drop_punctuation",
                         "entity_rules", "lemmatizer"},
                     "textprep");
      read(t, "fold_umlauts", cfg.rules.fold_umlauts);
      read(t, "drop_single_letters", cfg.rules.drop_single_letters);
      read(t, "drop_numbers", cfg.rules.drop_numbers);
      read(t, "drop_punctuation", cfg.rules.drop_punctuation);
      if (t.contains("entity_rules")) {
        cfg.rules.entity_rules.clear();
        for (const auto& rule : t.at("entity_rules")) {
          cfg.rules.entity_rules.push_back(
              {rule.at("pattern").get<std::string>(), rule.at("replacement").get<std::string>()});
        }
      }
      if (t.contains("lemmatizer") && !t.at("lemmatizer").is_null()) {
        cfg.lemmatizer_path = t.at("lemmatizer").get<std::string>();
      }
    }
    if (root.contains("features")) {
      const auto& f = root.at("features");
      reject_unknown(f, {"ngram_min", "ngram_max", "l2_normalize"}, "features");
      read(f, "ngram_min", cfg.features.ngram_range.min_n);
      read(f, "ngram_max", cfg.features.ngram_range.max_n);
      read(f, "l2_normalize", cfg.features.l2_normalize);
    }
    if (root.contains("svm")) {
      read_svm(root.at("svm"), cfg.svm, "svm");
      // Overrides not listed explicitly follow the base section.
      cfg.svm_overrides.clear();
    }
    if (root.contains("svm_overrides")) {
      const auto& o = root.at("svm_overrides");
      if (!o.is_object()) throw ParseError("config: 'svm_overrides' must be an object");
      for (const auto& [name, value] : o.items()) {
        const auto algorithm = multilabel::algorithm_from_string(name);
        svm::TrainConfig override_cfg = cfg.svm;
        read_svm(value, override_cfg, "svm_overrides." + name);
        cfg.svm_overrides[algorithm] = override_cfg;
      }
    }
    if (root.contains("ecc")) {
      const auto& e = root.at("ecc");
      reject_unknown(e, {"n_chains", "vote_threshold", "bootstrap"}, "ecc");
      read(e, "n_chains", cfg.ecc.n_chains);
      read(e, "vote_threshold", cfg.ecc.vote_threshold);
      read(e, "bootstrap", cfg.ecc.bootstrap);
    }
    if (root.contains("chain")) {
      const auto& c = root.at("chain");
      reject_unknown(c, {"training_labels", "random_order"}, "chain");
      if (c.contains("training_labels")) {
        cfg.chain_training = multilabel::chain_training_from_string(c.at("training_labels").get<std::string>());
      }
      read(c, "random_order", cfg.random_chain_order);
    }
    if (root.contains("grid")) {
      const auto& g = root.at("grid");
      reject_unknown(g, {"kernels", "C", "gamma"}, "grid");
      if (g.contains("kernels")) {
        cfg.grid.kernels.clear();
        for (const auto& k : g.at("kernels")) cfg.grid.kernels.push_back(svm::kernel_from_string(k.get<std::string>()));
      }
      read(g, "C", cfg.grid.C);
      read(g, "gamma", cfg.grid.gamma);
    }
    if (root.contains("split")) {
      const auto& s = root.at("split");
      reject_unknown(s, {"train", "validation", "test"}, "split");
      read(s, "train", cfg.split.train);
      read(s, "validation", cfg.split.validation);
      read(s, "test", cfg.split.test);
    }
    read(root, "force_min_one", cfg.force_min_one);
    read(root, "threads", cfg.threads);
    std::uint64_t seed = cfg.seed;
    read(root, "seed", seed);
    cfg.set_seed(seed);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ToolkitConfig load_config(const std::string& path) { return parse_config(io::read_file(path)); }

std::string config_to_json(const ToolkitConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["dataset"] = {{"id_column", cfg.dataset.id_column},
                  {"text_column", cfg.dataset.text_column},
                  {"labels_column", cfg.dataset.labels_column},
                  {"label_delimiter", std::string(1, cfg.dataset.label_delimiter)},
                  {"field_delimiter", std::string(1, cfg.dataset.field_delimiter)},
                  {"label_codes", cfg.dataset.label_codes}};
  json rules = json::array();
  for (const auto& r : cfg.rules.entity_rules) rules.push_back({{"pattern", r.pattern}, {"replacement", r.replacement}});
  j["textprep"] = {{"fold_umlauts", cfg.rules.fold_umlauts},
                   {"drop_single_letters", cfg.rules.drop_single_letters},
                   {"drop_numbers", cfg.rules.drop_numbers},
                   {"drop_punctuation", cfg.rules.drop_punctuation},
                   {"entity_rules", rules},
                   {"lemmatizer", cfg.lemmatizer_path ? json(*cfg.lemmatizer_path) : json(nullptr)}};
  j["features"] = {{"ngram_min", cfg.features.ngram_range.min_n},
                   {"ngram_max", cfg.features.ngram_range.max_n},
                   {"l2_normalize", cfg.features.l2_normalize}};
  j["svm"] = svm_json(cfg.svm);
  j["svm_overrides"] = json::object();
  for (const auto& [algorithm, o] : cfg.svm_overrides) j["svm_overrides"][multilabel::to_string(algorithm)] = svm_json(o);
  j["ecc"] = {{"n_chains", cfg.ecc.n_chains}, {"vote_threshold", cfg.ecc.vote_threshold}, {"bootstrap", cfg.ecc.bootstrap}};
  j["chain"] = {{"training_labels", multilabel::to_string(cfg.chain_training)}, {"random_order", cfg.random_chain_order}};
  json kernels = json::array();
  for (auto k : cfg.grid.kernels) kernels.push_back(svm::to_string(k));
  j["grid"] = {{"kernels", kernels}, {"C", cfg.grid.C}, {"gamma", cfg.grid.gamma}};
  j["split"] = {{"train", cfg.split.train}, {"validation", cfg.split.validation}, {"test", cfg.split.test}};
  j["force_min_one"] = cfg.force_min_one;
  j["threads"] = cfg.threads;
  return j.dump(2);
}

}  // namespace survcode
