// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit when
// any criterion fails. Data-gated criteria print SKIP without their data.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "support/dual_oracle.hpp"
#include "support/synthetic.hpp"
#include "survcode/config.hpp"
#include "survcode/eval.hpp"
#include "survcode/features.hpp"
#include "survcode/interchange.hpp"
#include "survcode/io.hpp"
#include "survcode/multilabel.hpp"
#include "survcode/pipeline.hpp"
#include "survcode/svm.hpp"

using namespace survcode;
using multilabel::Algorithm;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
  Outcome outcome = Outcome::pass;
  std::string detail;
};

Verdict fail(std::string why) { return {Outcome::fail, std::move(why)}; }

int failures = 0;

void criterion(const std::string& name, double budget_seconds, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = fail(std::string("exception: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (v.outcome == Outcome::pass && budget_seconds > 0 && seconds > budget_seconds) {
    v = fail("runtime " + std::to_string(seconds) + " s exceeds " + std::to_string(budget_seconds) + " s");
  }
  const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
  if (v.outcome == Outcome::fail) ++failures;
  std::printf("%s  %-28s %7.2fs  %s\n", tag, name.c_str(), seconds, v.detail.c_str());
  std::fflush(stdout);
}

double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

LabelSet random_set(Rng& rng, std::size_t n_labels, bool allow_empty) {
  LabelSet s;
  do {
    for (std::size_t k = 0; k < n_labels; ++k) {
      if (rng.uniform_index(4) == 0) s.insert(static_cast<LabelIndex>(k));
    }
  } while (!allow_empty && s.empty());
  return s;
}

struct Encoded {
  features::TfidfModel tfidf;
  std::vector<SparseVector> X;
  std::vector<LabelSet> Y;
};

Encoded encode(const data::Dataset& d, std::span<const std::string> ids, const features::TfidfModel* fitted) {
  const textprep::Preprocessor pre;
  std::vector<textprep::Document> docs;
  Encoded e;
  for (const auto& id : ids) {
    const auto& r = d.at(id);
    docs.push_back(pre.process({r.id, r.text}));
    e.Y.push_back(r.labels);
  }
  e.tfidf = fitted ? *fitted : features::TfidfModel::fit(docs);
  e.X = e.tfidf.transform(docs);
  return e;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << v;
  return out.str();
}

// ---- criteria ---------------------------------------------------------------

Verdict metric_oracle() {
  const auto rec = [](LabelSet t, LabelSet p) { return eval::PredictionRecord{"", p, t, {}, ""}; };
  const std::vector<eval::PredictionRecord> five = {rec({0}, {0}), rec({0, 1}, {0}), rec({2}, {2}),
                                                    rec({1}, {1, 2}), rec({0}, {0})};
  const double z = eval::zero_one_loss(five);
  const double h = eval::hamming_loss(five, 3);
  if (std::abs(z - 0.4) > 1e-12) return fail("zero_one " + std::to_string(z));
  if (std::abs(h - 2.0 / 15.0) > 1e-12) return fail("hamming " + std::to_string(h));
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n_labels = 1 + rng.uniform_index(10);
    std::vector<eval::PredictionRecord> r;
    const auto n = 1 + rng.uniform_index(50);
    for (std::size_t i = 0; i < n; ++i) r.push_back(rec(random_set(rng, n_labels, false), random_set(rng, n_labels, true)));
    if (eval::hamming_loss(r, n_labels) > eval::zero_one_loss(r)) return fail("hamming > zero_one on fixture " + std::to_string(trial));
  }
  return {Outcome::pass, "0.4 and 2/15 exact; hamming <= zero_one on 1000 fixtures"};
}

Verdict svm_oracle() {
  Rng rng(2);
  std::size_t fixtures = 0;
  double worst = 0.0;
  double worst_eq = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(9);
    std::vector<SparseVector> X;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      SparseVector x;
      x.dim = 2;
      const double a = uniform(rng, -2, 2);
      const double b = uniform(rng, -2, 2);
      x.push(0, a);
      x.push(1, b);
      X.push_back(x);
      y.push_back(a - 0.7 * b + uniform(rng, -1, 1) > 0 ? 1 : -1);
    }
    y[0] = 1;
    y[1] = -1;
    const double C = std::vector<double>{0.1, 1, 10, 100}[rng.uniform_index(4)];
    const double gamma = std::vector<double>{0.1, 0.5, 1}[rng.uniform_index(3)];
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd Kl(nn, nn), Kr(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
      for (Eigen::Index j = 0; j < nn; ++j) {
        Kl(i, j) = dot(X[i], X[j]) + 1.0;
        Kr(i, j) = svm::rbf_kernel(X[i], X[j], gamma);
      }
    }
    const auto lin_oracle = testing::brute_force_dual(Kl, y, C, false);
    const auto rbf_oracle = testing::brute_force_dual(Kr, y, C, true);
    if (!lin_oracle || !rbf_oracle) return fail("oracle found no KKT point on fixture " + std::to_string(trial));

    svm::TrainConfig cfg;
    cfg.C = C;
    cfg.tolerance = 1e-6;
    cfg.max_iterations = 1000000;
    svm::TrainStats lin_stats;
    const auto lin = svm::train_binary(X, y, cfg, &lin_stats);
    cfg.kernel = svm::Kernel::rbf;
    cfg.gamma = gamma;
    svm::TrainStats rbf_stats;
    const auto rbf = svm::train_binary(X, y, cfg, &rbf_stats);
    if (!lin_stats.converged || !rbf_stats.converged) return fail("solver did not converge on fixture " + std::to_string(trial));

    double eq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (double a : {lin_stats.alphas[i], rbf_stats.alphas[i]}) {
        if (a < 0.0 || a > C) return fail("alpha outside [0, C]");
      }
      eq += rbf_stats.alphas[i] * y[i];
    }
    worst_eq = std::max(worst_eq, std::abs(eq));
    if (std::abs(eq) > 1e-9 * C) return fail("equality constraint violated by " + std::to_string(eq));

    for (int probe = 0; probe < 20; ++probe) {
      SparseVector x;
      x.dim = 2;
      x.push(0, uniform(rng, -2.5, 2.5));
      x.push(1, uniform(rng, -2.5, 2.5));
      double lin_ref = 0.0;
      double rbf_ref = rbf_oracle->bias;
      for (std::size_t i = 0; i < n; ++i) {
        lin_ref += lin_oracle->alpha[i] * y[i] * (dot(X[i], x) + 1.0);
        rbf_ref += rbf_oracle->alpha[i] * y[i] * svm::rbf_kernel(X[i], x, gamma);
      }
      worst = std::max({worst, std::abs(svm::decision(lin, x) - lin_ref), std::abs(svm::decision(rbf, x) - rbf_ref)});
    }
    ++fixtures;
  }
  if (worst > 1e-3) return fail("max decision gap " + std::to_string(worst));
  std::ostringstream msg;
  msg << fixtures << " fixtures (2-10 points), max decision gap " << std::scientific << worst << ", max |sum a y| " << worst_eq;
  return {Outcome::pass, msg.str()};
}

Verdict tfidf_oracle() {
  const std::vector<textprep::Document> docs = {{"1", {"krieg", "krieg", "frieden"}}, {"2", {"frieden"}}};
  const auto model = features::TfidfModel::fit(docs);
  const auto x = model.transform(docs[0]);
  const auto& v = model.vocabulary();
  const double k = x.values[static_cast<std::size_t>(v.index_of("krieg") == static_cast<long>(x.indices[0]) ? 0 : 1)];
  const double f = x.values[static_cast<std::size_t>(v.index_of("frieden") == static_cast<long>(x.indices[0]) ? 0 : 1)];
  if (std::abs(k - 0.9422) > 1e-4 || std::abs(f - 0.3352) > 1e-4) return fail("got (" + fixed(k) + ", " + fixed(f) + ")");
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<textprep::Document> corpus;
    std::map<std::string, std::size_t> df;
    const auto n = 1 + rng.uniform_index(40);
    for (std::size_t i = 0; i < n; ++i) {
      textprep::Document d{std::to_string(i), {}};
      std::set<std::string> seen;
      for (std::size_t t = 0, len = rng.uniform_index(10); t < len; ++t) {
        d.tokens.push_back("t" + std::string(1, 'a' + rng.uniform_index(20)));
        seen.insert(d.tokens.back());
      }
      for (const auto& s : seen) ++df[s];
      corpus.push_back(d);
    }
    const auto vocab = features::fit_vocabulary(corpus);
    if (vocab.size() != df.size()) return fail("vocabulary size mismatch");
    for (const auto& [term, count] : df) {
      if (vocab.df(term) != count) return fail("df mismatch for " + term);
    }
  }
  return {Outcome::pass, "(" + fixed(k) + ", " + fixed(f) + "); df round-trip on 200 corpora"};
}

Verdict meta_structure() {
  const auto d = testing::correlated_corpus(300, 4);
  const auto ids = d.ids();
  const auto e = encode(d, ids, nullptr);
  const std::size_t L = d.space().size();
  svm::TrainConfig cfg;

  // LP on random inputs.
  svm::TrainConfig rbf = cfg;
  rbf.kernel = svm::Kernel::rbf;
  rbf.gamma = 0.5;
  const auto lp = multilabel::lp_fit(e.X, e.Y, rbf, 0);
  Rng rng(5);
  const auto dim = e.tfidf.dim();
  for (int i = 0; i < 10000; ++i) {
    SparseVector x;
    x.dim = dim;
    std::set<std::uint32_t> idx;
    for (std::size_t t = 0, nnz = rng.uniform_index(5); t < nnz; ++t) idx.insert(static_cast<std::uint32_t>(rng.uniform_index(dim)));
    for (auto k : idx) x.push(k, uniform(rng, 0.05, 1.0));
    const auto p = multilabel::lp_predict(lp, x);
    if (p.labels.empty()) return fail("LP predicted the empty set");
    if (lp.registry.index_of(p.labels) < 0) return fail("LP predicted an unregistered labelset");
  }

  // ECC of one chain against CC.
  multilabel::ECCConfig ecc;
  ecc.n_chains = 1;
  ecc.bootstrap = false;
  ecc.fixed_order = std::vector<LabelIndex>{5, 2, 7, 0, 1, 3, 6, 4};
  const auto ensemble = multilabel::ecc_fit(e.X, e.Y, L, ecc, cfg);
  auto cc_cfg = cfg;
  cc_cfg.seed = multilabel::plan_chains(ecc, L)[0].svm_seed;
  const auto chain = multilabel::cc_fit(e.X, e.Y, L, {*ecc.fixed_order, 0}, cc_cfg);
  for (const auto& x : e.X) {
    if (multilabel::ecc_predict(ensemble, x).labels != multilabel::cc_predict(chain, x).labels) {
      return fail("single-chain ECC differs from CC");
    }
  }

  // BR against its per-label binary predictions.
  const auto br = multilabel::br_fit(e.X, e.Y, L, cfg, 0);
  for (const auto& x : e.X) {
    LabelSet united;
    for (std::size_t k = 0; k < L; ++k) {
      if (svm::predict_binary(br.models[k], x) == 1) united.insert(static_cast<LabelIndex>(k));
    }
    if (multilabel::br_predict(br, x).labels != united) return fail("BR differs from the union of binary predictions");
  }
  return {Outcome::pass, "LP non-empty on 10000 inputs; ECC(1)=CC and BR=union on 300 points"};
}

Verdict force_min_one() {
  std::size_t replaced = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto d = testing::correlated_corpus(120, 1000 + seed);
    auto cfg = ToolkitConfig::defaults();
    cfg.set_seed(seed);
    cfg.threads = 0;
    const auto split = data::make_split(d, cfg.split);
    const auto bundle = pipeline::train(d, split.train, Algorithm::br, cfg);
    const auto before = pipeline::predict(bundle, d, split.test, false);
    const auto after = pipeline::predict(bundle, d, split.test, true);
    for (const auto& r : after) {
      if (r.predicted.empty()) return fail("zero-label prediction survived (seed " + std::to_string(seed) + ")");
    }
    for (const auto& r : before) replaced += r.predicted.empty();
    if (eval::zero_one_loss(after) > eval::zero_one_loss(before)) return fail("loss increased (seed " + std::to_string(seed) + ")");
  }
  return {Outcome::pass, "100 experiments, " + std::to_string(replaced) + " empty predictions replaced, loss never increased"};
}

// Measured once on this corpus and seed and pinned: 44 and 52 wrong out
// of 200 test records.
constexpr double kPinnedEccLoss = 44.0 / 200.0;
constexpr double kPinnedBrLoss = 52.0 / 200.0;

Verdict synthetic_end_to_end() {
  const auto d = testing::correlated_corpus(1000, 2024);
  const auto stats = data::dataset_stats(d);
  auto cfg = ToolkitConfig::defaults();
  cfg.set_seed(7);
  const auto split = data::make_split(d, cfg.split);
  const auto br = pipeline::run_experiment(d, split, Algorithm::br, cfg, false);
  const auto ecc = pipeline::run_experiment(d, split, Algorithm::ecc, cfg, false);
  const std::string values = "cardinality " + fixed(stats.cardinality, 3) + ", ECC " + fixed(ecc.report.zero_one) +
                             " <= BR " + fixed(br.report.zero_one);
  if (std::abs(stats.cardinality - 1.2) > 0.05) return fail("corpus cardinality " + fixed(stats.cardinality, 3));
  if (!(ecc.report.zero_one <= br.report.zero_one)) return fail(values);
  if (!(std::abs(ecc.report.zero_one - kPinnedEccLoss) <= 1e-12) ||
      !(std::abs(br.report.zero_one - kPinnedBrLoss) <= 1e-12)) {
    return fail("pinned values moved: " + values);
  }
  return {Outcome::pass, values};
}

Verdict determinism() {
  const std::filesystem::path work = std::filesystem::temp_directory_path() / "survcode_acceptance";
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);
  io::write_file_atomic((work / "data.csv").string(), testing::to_csv(testing::correlated_corpus(300, 11)));
  const std::string cli = SURVCODE_CLI_PATH;
  const auto run = [&](const std::string& args) {
    const std::string cmd = "cd '" + work.string() + "' && '" + cli + "' --seed 13 " + args + " > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) throw std::runtime_error("command failed: " + args);
  };
  run("split --data data.csv --out split.json");
  for (const char* algorithm : {"br", "lp", "cc", "ecc"}) {
    std::string files[2];
    for (int rep = 0; rep < 2; ++rep) {
      const std::string tag = std::string(algorithm) + std::to_string(rep);
      run("train --data data.csv --split split.json --algorithm " + std::string(algorithm) + " --out " + tag + ".json");
      run("predict --model " + tag + ".json --data data.csv --split split.json --part test --out " + tag + ".jsonl");
      files[rep] = io::read_file((work / (tag + ".jsonl")).string());
    }
    if (files[0].empty() || files[0] != files[1]) return fail(std::string(algorithm) + " outputs differ");
  }
  std::filesystem::remove_all(work);
  return {Outcome::pass, "byte-identical interchange files for br, lp, cc, ecc"};
}

Verdict leakage() {
  auto records = testing::disjoint_corpus(60, 12).records();
  const auto d0 = data::Dataset(records, testing::synthetic_space(6));
  auto split = data::make_split(d0, data::SplitConfig{});
  for (auto& r : records) {
    if (r.id == split.test.front()) r.text += " testonlysentinel";
  }
  const data::Dataset d(records, testing::synthetic_space(6));
  for (auto algorithm : {Algorithm::br, Algorithm::lp, Algorithm::cc, Algorithm::ecc}) {
    const auto bundle = pipeline::train(d, split.train, algorithm, ToolkitConfig::defaults());
    if (bundle.tfidf.vocabulary().index_of("testonlysentinel") >= 0) {
      return fail(std::string("sentinel in vocabulary for ") + multilabel::to_string(algorithm));
    }
  }
  return {Outcome::pass, "test-only token absent from every fitted vocabulary"};
}

Verdict gles() {
  const char* path = std::getenv("SURVCODE_GLES_DATA");
  if (!path || !*path) return {Outcome::skip, "set SURVCODE_GLES_DATA to the prepared wave-1 CSV"};
  auto cfg = ToolkitConfig::defaults();
  if (const char* config = std::getenv("SURVCODE_GLES_CONFIG"); config && *config) cfg = load_config(config);
  cfg.dataset.path = path;
  const auto d = data::load_dataset(cfg.dataset);
  const auto s = data::dataset_stats(d);
  std::ostringstream msg;
  msg << "n=" << s.n_records << " L=" << s.n_labels << " card=" << fixed(s.cardinality, 2)
      << " multi=" << fixed(s.multi_label_percent, 1) << "% max=" << s.max_labels;
  if (s.n_records != 17584 || s.n_labels != 55 || std::abs(s.cardinality - 1.17) > 0.005 ||
      std::abs(s.multi_label_percent - 12.6) > 0.05 || s.max_labels != 5) {
    return fail("stats " + msg.str());
  }
  const auto split = data::make_split(d, cfg.split);
  const std::pair<Algorithm, double> targets[] = {{Algorithm::ecc, 0.1891}, {Algorithm::lp, 0.1959}, {Algorithm::br, 0.2161}};
  bool ok = true;
  for (const auto& [algorithm, target] : targets) {
    const auto r = pipeline::run_experiment(d, split, algorithm, cfg, false);
    msg << "; " << multilabel::to_string(algorithm) << " " << fixed(r.report.zero_one);
    ok = ok && std::abs(r.report.zero_one - target) <= 0.03;
  }
  return ok ? Verdict{Outcome::pass, msg.str()} : fail(msg.str());
}

}  // namespace

int main() {
  criterion("metric oracle", 1.0, metric_oracle);
  criterion("svm oracle", 10.0, svm_oracle);
  criterion("tf-idf oracle", 0.0, tfidf_oracle);
  criterion("meta-algorithm structure", 0.0, meta_structure);
  criterion("force_min_one_label", 0.0, force_min_one);
  criterion("synthetic end-to-end", 120.0, synthetic_end_to_end);
  criterion("determinism", 0.0, determinism);
  criterion("leakage sentinel", 0.0, leakage);
  criterion("gles wave-1 (data-gated)", 0.0, gles);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
