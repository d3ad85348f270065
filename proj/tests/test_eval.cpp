#include "doctest.h"

#include <cmath>

#include "survcode/error.hpp"
#include "survcode/eval.hpp"
#include "survcode/rng.hpp"

using namespace survcode;
using namespace survcode::eval;

namespace {

PredictionRecord rec(LabelSet truth, LabelSet predicted) {
  return PredictionRecord{"", std::move(predicted), std::move(truth), {}, "t"};
}

// A=0, B=1, C=2.
std::vector<PredictionRecord> five_records() {
  return {rec({0}, {0}), rec({0, 1}, {0}), rec({2}, {2}), rec({1}, {1, 2}), rec({0}, {0})};
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

}  // namespace

TEST_CASE("five-record fixture") {
  const auto r = five_records();
  CHECK(std::abs(zero_one_loss(r) - 0.4) <= 1e-12);
  CHECK(std::abs(hamming_loss(r, 3) - 2.0 / 15.0) <= 1e-12);
  const auto strata = loss_by_true_count(r);
  // Singletons: 4 records, one wrong; the pair is wrong.
  CHECK(strata.size() == 2);
  CHECK(strata.at(1) == doctest::Approx(0.25));
  CHECK(strata.at(2) == doctest::Approx(1.0));
  CHECK(true_count_sizes(r) == std::map<std::size_t, std::size_t>{{1, 4}, {2, 1}});
  const auto dist = predicted_count_distribution(r);
  CHECK(dist.at(1) == doctest::Approx(80.0));
  CHECK(dist.at(2) == doctest::Approx(20.0));
}

TEST_CASE("boundary losses") {
  std::vector<PredictionRecord> perfect = {rec({0}, {0}), rec({1, 2}, {1, 2})};
  CHECK(zero_one_loss(perfect) == 0.0);
  CHECK(hamming_loss(perfect, 3) == 0.0);
  CHECK(loss_by_true_count(perfect).at(2) == 0.0);
  std::vector<PredictionRecord> empty_preds = {rec({0}, {}), rec({1, 2}, {})};
  CHECK(zero_one_loss(empty_preds) == 1.0);
  std::vector<PredictionRecord> none;
  CHECK_THROWS_AS(zero_one_loss(none), InvalidArgument);
  CHECK_THROWS_AS(hamming_loss(none, 3), InvalidArgument);
  std::vector<PredictionRecord> no_truth = {PredictionRecord{"x", {0}, std::nullopt, {}, ""}};
  CHECK_THROWS_AS(zero_one_loss(no_truth), DataError);
}

TEST_CASE("predicted count distribution") {
  std::vector<PredictionRecord> r;
  for (int i = 0; i < 9; ++i) r.push_back(rec({0}, {static_cast<LabelIndex>(i % 3)}));
  r.push_back(rec({0}, {0, 1}));
  const auto dist = predicted_count_distribution(r);
  CHECK(dist.size() == 2);
  CHECK(dist.at(1) == doctest::Approx(90.0));
  CHECK(dist.at(2) == doctest::Approx(10.0));
}

TEST_CASE("cohen kappa from tables") {
  CHECK(cohen_kappa({{40, 5}, {5, 50}}) == doctest::Approx((0.9 - 0.505) / (1 - 0.505)));
  CHECK(cohen_kappa({{40, 5}, {5, 50}}) == doctest::Approx(0.798).epsilon(1e-3));
  CHECK(cohen_kappa({{0, 50}, {50, 0}}) == doctest::Approx(-1.0));
  CHECK(cohen_kappa({{30, 0}, {0, 70}}) == doctest::Approx(1.0));
  // Hand table over three categories: p_o = 0.75,
  // p_e = (0.4*0.4 + 0.3*0.35 + 0.3*0.25) = 0.34.
  const std::vector<std::vector<double>> three = {{30, 5, 5}, {5, 25, 0}, {5, 5, 20}};
  CHECK(cohen_kappa(three) == doctest::Approx((0.75 - 0.34) / (1 - 0.34)));
  CHECK(cohen_kappa({{10, 0}, {0, 0}}) == 1.0);
  // Constant but different coders: chance agreement 0, kappa 0.
  CHECK(cohen_kappa({{0, 10}, {0, 0}}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(cohen_kappa({{0, 0}, {0, 0}}), InvalidArgument);
  CHECK_THROWS_AS(cohen_kappa({{1, 2}}), InvalidArgument);
}

TEST_CASE("label- and answer-level kappa") {
  const std::vector<LabelSet> c1 = {{0}, {1}, {0, 1}, {2}};
  CHECK(kappa_label_level(c1, c1, 3) == doctest::Approx(1.0));
  CHECK(kappa_answer_level(c1, c1) == doctest::Approx(1.0));

  const std::vector<LabelSet> a = {{0}, {1}, {0}, {1}};
  const std::vector<LabelSet> b = {{1}, {0}, {1}, {0}};
  CHECK(kappa_answer_level(a, b) == doctest::Approx(-1.0));
  // Pooled over two labels: every cell disagrees, marginals balanced.
  CHECK(kappa_label_level(a, b, 2) == doctest::Approx(-1.0));

  // Pooled 2x2 by hand: 4 records x 3 labels = 12 decisions.
  const std::vector<LabelSet> x = {{0}, {0, 1}, {2}, {1}};
  const std::vector<LabelSet> y = {{0}, {0}, {2}, {1, 2}};
  // both=4, only x=1, only y=1, neither=6: p_o=10/12, p_e=(5*5+7*7)/144.
  const double po = 10.0 / 12.0;
  const double pe = (25.0 + 49.0) / 144.0;
  CHECK(kappa_label_level(x, y, 3) == doctest::Approx((po - pe) / (1 - pe)));
  // Answer level: categories {0},{0,1},{2},{1},{1,2}; agreement 2/4.
  // Marginals: {0}: 1 and 2, {0,1}: 1 and 0, {2}: 1 and 1, {1}: 1 and 0,
  // {1,2}: 0 and 1. p_e = (2 + 0 + 1 + 0 + 0) / 16.
  CHECK(kappa_answer_level(x, y) == doctest::Approx((0.5 - 3.0 / 16.0) / (1 - 3.0 / 16.0)));
}

TEST_CASE("evaluate bundles the metrics") {
  const auto r = five_records();
  const auto report = evaluate(r, 3);
  CHECK(report.n_records == 5);
  CHECK(report.zero_one == doctest::Approx(0.4));
  CHECK(report.hamming == doctest::Approx(2.0 / 15.0));
  CHECK(report.model_tag == "t");
  const auto json = report_to_json(report);
  CHECK(json.find("\"zero_one_loss\"") != std::string::npos);
  const std::vector<EvalReport> reports = {report};
  const auto table = format_tables(reports);
  CHECK(table.find("0.2500") != std::string::npos);
  CHECK(table.find("80.0") != std::string::npos);
}

TEST_CASE("property: hamming <= zero-one, permutation invariance, strata recombine") {
  Rng rng(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n_labels = 1 + rng.uniform_index(8);
    std::vector<PredictionRecord> r;
    const auto n = 1 + rng.uniform_index(20);
    for (std::size_t i = 0; i < n; ++i) {
      r.push_back(rec(random_set(rng, n_labels, false), random_set(rng, n_labels, true)));
    }
    const double z = zero_one_loss(r);
    const double h = hamming_loss(r, n_labels);
    CHECK(h <= z + 1e-15);
    CHECK(h >= 0.0);
    CHECK(z <= 1.0);

    const auto strata = loss_by_true_count(r);
    const auto sizes = true_count_sizes(r);
    double recombined = 0.0;
    for (const auto& [k, loss] : strata) recombined += loss * static_cast<double>(sizes.at(k));
    CHECK(recombined / static_cast<double>(n) == doctest::Approx(z));

    double pct = 0.0;
    for (const auto& [k, p] : predicted_count_distribution(r)) pct += p;
    CHECK(pct == doctest::Approx(100.0));

    rng.shuffle(std::span<PredictionRecord>(r));
    CHECK(zero_one_loss(r) == doctest::Approx(z).epsilon(1e-15));
    CHECK(hamming_loss(r, n_labels) == doctest::Approx(h).epsilon(1e-15));
  }
}
