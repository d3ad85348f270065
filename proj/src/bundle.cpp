#include "survcode/bundle.hpp"

#include "json.hpp"
#include "survcode/error.hpp"
#include "survcode/io.hpp"

namespace survcode {
namespace {

using nlohmann::json;
using multilabel::Algorithm;

json sparse_json(const SparseVector& v) {
  return {{"dim", v.dim}, {"indices", v.indices}, {"values", v.values}};
}

SparseVector sparse_from(const json& j) {
  SparseVector v;
  v.dim = j.at("dim").get<std::size_t>();
  v.indices = j.at("indices").get<std::vector<std::uint32_t>>();
  v.values = j.at("values").get<std::vector<double>>();
  if (v.indices.size() != v.values.size()) throw ParseError("bundle: sparse vector length mismatch");
  return v;
}

const char* kind_name(svm::ModelKind kind) {
  switch (kind) {
    case svm::ModelKind::linear: return "linear";
    case svm::ModelKind::rbf: return "rbf";
    case svm::ModelKind::constant: return "constant";
  }
  return "?";
}

json binary_json(const svm::BinaryModel& m) {
  json j;
  j["kind"] = kind_name(m.kind);
  j["dim"] = m.dim;
  j["bias"] = m.bias;
  j["degenerate"] = m.degenerate;
  if (m.kind == svm::ModelKind::linear) {
    SparseVector w;
    w.dim = m.dim;
    for (std::size_t k = 0; k < m.weights.size(); ++k) w.push(static_cast<std::uint32_t>(k), m.weights[k]);
    j["weights"] = sparse_json(w);
  } else if (m.kind == svm::ModelKind::rbf) {
    j["gamma"] = m.gamma;
    j["coefficients"] = m.coefficients;
    json svs = json::array();
    for (const auto& sv : m.support_vectors) svs.push_back(sparse_json(sv));
    j["support_vectors"] = svs;
  }
  return j;
}

svm::BinaryModel binary_from(const json& j) {
  svm::BinaryModel m;
  const auto kind = j.at("kind").get<std::string>();
  m.dim = j.at("dim").get<std::size_t>();
  m.bias = j.at("bias").get<double>();
  m.degenerate = j.at("degenerate").get<bool>();
  if (kind == "linear") {
    m.kind = svm::ModelKind::linear;
    const auto w = sparse_from(j.at("weights"));
    m.weights.assign(m.dim, 0.0);
    for (std::size_t k = 0; k < w.indices.size(); ++k) m.weights.at(w.indices[k]) = w.values[k];
  } else if (kind == "rbf") {
    m.kind = svm::ModelKind::rbf;
    m.gamma = j.at("gamma").get<double>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    for (const auto& sv : j.at("support_vectors")) m.support_vectors.push_back(sparse_from(sv));
    if (m.coefficients.size() != m.support_vectors.size()) throw ParseError("bundle: coefficient count mismatch");
  } else if (kind == "constant") {
    m.kind = svm::ModelKind::constant;
  } else {
    throw ParseError("bundle: unknown model kind '" + kind + "'");
  }
  m.finalize();
  return m;
}

json binaries_json(const std::vector<svm::BinaryModel>& models) {
  json arr = json::array();
  for (const auto& m : models) arr.push_back(binary_json(m));
  return arr;
}

std::vector<svm::BinaryModel> binaries_from(const json& j) {
  std::vector<svm::BinaryModel> out;
  for (const auto& m : j) out.push_back(binary_from(m));
  return out;
}

json chain_json(const multilabel::ClassifierChain& c) {
  return {{"order", c.spec.order},
          {"bootstrap_seed", c.spec.bootstrap_seed},
          {"feature_dim", c.feature_dim},
          {"models", binaries_json(c.models)}};
}

multilabel::ClassifierChain chain_from(const json& j) {
  multilabel::ClassifierChain c;
  c.spec.order = j.at("order").get<std::vector<LabelIndex>>();
  c.spec.bootstrap_seed = j.at("bootstrap_seed").get<std::uint64_t>();
  c.feature_dim = j.at("feature_dim").get<std::size_t>();
  c.models = binaries_from(j.at("models"));
  c.spec.validate(c.models.size());
  return c;
}

json model_json(const multilabel::MetaModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, multilabel::BinaryRelevance>) {
          return {{"n_labels", m.n_labels}, {"models", binaries_json(m.models)}};
        } else if constexpr (std::is_same_v<T, multilabel::LabelPowerset>) {
          json sets = json::array();
          for (const auto& s : m.registry.sets) sets.push_back(s.items());
          return {{"registry", {{"sets", sets}, {"frequencies", m.registry.frequencies}}},
                  {"classes", m.classifier.classes},
                  {"class_frequencies", m.classifier.frequencies},
                  {"models", binaries_json(m.classifier.models)}};
        } else if constexpr (std::is_same_v<T, multilabel::ClassifierChain>) {
          return chain_json(m);
        } else {
          json chains = json::array();
          for (const auto& c : m.chains) chains.push_back(chain_json(c));
          json cfg = {{"n_chains", m.config.n_chains},
                      {"vote_threshold", m.config.vote_threshold},
                      {"seed", m.config.seed},
                      {"bootstrap", m.config.bootstrap}};
          if (m.config.fixed_order) cfg["fixed_order"] = *m.config.fixed_order;
          return {{"n_labels", m.n_labels}, {"config", cfg}, {"chains", chains}};
        }
      },
      model);
}

multilabel::MetaModel model_from(Algorithm algorithm, const json& j) {
  switch (algorithm) {
    case Algorithm::br: {
      multilabel::BinaryRelevance m;
      m.n_labels = j.at("n_labels").get<std::size_t>();
      m.models = binaries_from(j.at("models"));
      if (m.models.size() != m.n_labels) throw ParseError("bundle: BR model count mismatch");
      return m;
    }
    case Algorithm::lp: {
      multilabel::LabelPowerset m;
      for (const auto& s : j.at("registry").at("sets")) {
        m.registry.sets.emplace_back(s.get<std::vector<LabelIndex>>());
      }
      m.registry.frequencies = j.at("registry").at("frequencies").get<std::vector<std::size_t>>();
      m.classifier.classes = j.at("classes").get<std::vector<int>>();
      m.classifier.frequencies = j.at("class_frequencies").get<std::vector<std::size_t>>();
      m.classifier.models = binaries_from(j.at("models"));
      if (m.classifier.models.size() != m.classifier.classes.size()) {
        throw ParseError("bundle: LP class count mismatch");
      }
      return m;
    }
    case Algorithm::cc:
      return chain_from(j);
    case Algorithm::ecc: {
      multilabel::EnsembleChains m;
      m.n_labels = j.at("n_labels").get<std::size_t>();
      const auto& cfg = j.at("config");
      m.config.n_chains = cfg.at("n_chains").get<std::size_t>();
      m.config.vote_threshold = cfg.at("vote_threshold").get<double>();
      m.config.seed = cfg.at("seed").get<std::uint64_t>();
      m.config.bootstrap = cfg.at("bootstrap").get<bool>();
      if (cfg.contains("fixed_order")) m.config.fixed_order = cfg.at("fixed_order").get<std::vector<LabelIndex>>();
      for (const auto& c : j.at("chains")) m.chains.push_back(chain_from(c));
      return m;
    }
  }
  throw ParseError("bundle: unknown algorithm");
}

}  // namespace

std::string bundle_to_json(const ModelBundle& b) {
  json j;
  j["format"] = "survcode-model";
  j["version"] = kBundleVersion;
  j["algorithm"] = multilabel::to_string(b.algorithm());
  json rules = json::array();
  for (const auto& r : b.rules.entity_rules) rules.push_back({{"pattern", r.pattern}, {"replacement", r.replacement}});
  j["textprep"] = {{"fold_umlauts", b.rules.fold_umlauts},
                   {"drop_single_letters", b.rules.drop_single_letters},
                   {"drop_numbers", b.rules.drop_numbers},
                   {"drop_punctuation", b.rules.drop_punctuation},
                   {"entity_rules", rules}};
  // std::map for a stable key order.
  j["lemmatizer"] = std::map<std::string, std::string>(b.lemmatizer.dictionary().begin(),
                                                       b.lemmatizer.dictionary().end());
  const auto& vocab = b.tfidf.vocabulary();
  j["features"] = {{"ngram_min", vocab.ngram_range().min_n},
                   {"ngram_max", vocab.ngram_range().max_n},
                   {"document_count", vocab.document_count()},
                   {"terms", vocab.terms()},
                   {"df", vocab.document_frequencies()},
                   {"idf", b.tfidf.idf()},
                   {"l2_normalize", b.tfidf.l2_normalize()}};
  j["labels"] = {{"codes", b.space.codes()}, {"frequencies", b.label_frequency}};
  j["svm"] = {{"kernel", svm::to_string(b.svm.kernel)},
              {"C", b.svm.C},
              {"gamma", b.svm.gamma ? json(*b.svm.gamma) : json(nullptr)},
              {"tolerance", b.svm.tolerance},
              {"max_iterations", b.svm.max_iterations}};
  j["chain_training"] = multilabel::to_string(b.chain_training);
  j["seed"] = b.seed;
  j["model"] = model_json(b.model);
  return j.dump();
}

ModelBundle bundle_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "survcode-model") throw ParseError("not a model bundle");
    if (j.at("version").get<int>() != kBundleVersion) {
      throw ParseError("unsupported bundle version " + std::to_string(j.at("version").get<int>()));
    }
    ModelBundle b;
    const auto& t = j.at("textprep");
    b.rules.fold_umlauts = t.at("fold_umlauts").get<bool>();
    b.rules.drop_single_letters = t.at("drop_single_letters").get<bool>();
    b.rules.drop_numbers = t.at("drop_numbers").get<bool>();
    b.rules.drop_punctuation = t.at("drop_punctuation").get<bool>();
    b.rules.entity_rules.clear();
    for (const auto& r : t.at("entity_rules")) {
      b.rules.entity_rules.push_back({r.at("pattern").get<std::string>(), r.at("replacement").get<std::string>()});
    }
    b.lemmatizer = textprep::Lemmatizer(j.at("lemmatizer").get<std::unordered_map<std::string, std::string>>());
    const auto& f = j.at("features");
    features::Vocabulary vocab({f.at("ngram_min").get<int>(), f.at("ngram_max").get<int>()},
                               f.at("terms").get<std::vector<std::string>>(),
                               f.at("df").get<std::vector<std::size_t>>(),
                               f.at("document_count").get<std::size_t>());
    b.tfidf = features::TfidfModel(std::move(vocab), f.at("idf").get<std::vector<double>>(),
                                   f.at("l2_normalize").get<bool>());
    b.space = LabelSpace(j.at("labels").at("codes").get<std::vector<std::string>>());
    b.label_frequency = j.at("labels").at("frequencies").get<std::vector<std::size_t>>();
    if (b.label_frequency.size() != b.space.size()) throw ParseError("bundle: label frequency count mismatch");
    const auto& s = j.at("svm");
    b.svm.kernel = svm::kernel_from_string(s.at("kernel").get<std::string>());
    b.svm.C = s.at("C").get<double>();
    if (!s.at("gamma").is_null()) b.svm.gamma = s.at("gamma").get<double>();
    b.svm.tolerance = s.at("tolerance").get<double>();
    b.svm.max_iterations = s.at("max_iterations").get<std::size_t>();
    b.chain_training = multilabel::chain_training_from_string(j.at("chain_training").get<std::string>());
    b.seed = j.at("seed").get<std::uint64_t>();
    b.model = model_from(multilabel::algorithm_from_string(j.at("algorithm").get<std::string>()), j.at("model"));
    return b;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model bundle: ") + e.what());
  }
}

void save_bundle(const std::string& path, const ModelBundle& bundle) {
  io::write_file_atomic(path, bundle_to_json(bundle) + "\n");
}

ModelBundle load_bundle(const std::string& path) { return bundle_from_json(io::read_file(path)); }

}  // namespace survcode
