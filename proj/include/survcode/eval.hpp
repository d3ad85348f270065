#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survcode/labels.hpp"

namespace survcode::eval {

struct PredictionRecord {
  std::string id;
  LabelSet predicted;
  std::optional<LabelSet> truth;
  std::vector<double> scores;  // per label index; empty when absent
  std::string model_tag;
};

// All metrics below throw InvalidArgument on empty input and DataError when
// a record lacks a (non-empty) ground-truth set.
double zero_one_loss(std::span<const PredictionRecord> records);
double hamming_loss(std::span<const PredictionRecord> records, std::size_t n_labels);
// 0/1 loss per true-set cardinality; absent strata are omitted.
std::map<std::size_t, double> loss_by_true_count(std::span<const PredictionRecord> records);
std::map<std::size_t, std::size_t> true_count_sizes(std::span<const PredictionRecord> records);
// Percent of records per predicted-set size.
std::map<std::size_t, double> predicted_count_distribution(
    std::span<const PredictionRecord> records);

// Cohen's kappa from a square agreement table (rows: coder 1, columns:
// coder 2). When chance agreement is 1 the result is 1.0 if observed
// agreement is also 1; otherwise DataError("degenerate marginals").
double cohen_kappa(const std::vector<std::vector<double>>& table);

// Every (record, label) inclusion decision pooled into one 2x2 table.
double kappa_label_level(std::span<const LabelSet> coder1, std::span<const LabelSet> coder2,
                         std::size_t n_labels);
// Each distinct labelset is one category.
double kappa_answer_level(std::span<const LabelSet> coder1, std::span<const LabelSet> coder2);

struct EvalReport {
  std::string model_tag;
  std::size_t n_records = 0;
  std::size_t n_labels = 0;
  double zero_one = 0.0;
  double hamming = 0.0;
  std::map<std::size_t, double> zero_one_by_true_count;
  std::map<std::size_t, std::size_t> records_by_true_count;
  std::map<std::size_t, double> predicted_count_distribution;
};

EvalReport evaluate(std::span<const PredictionRecord> records, std::size_t n_labels);

std::string report_to_json(const EvalReport& report, int indent = 2);
// Two aligned tables: 0/1 loss by true label count (4 decimals) and the
// distribution of predicted label counts (percent, 1 decimal).
std::string format_tables(std::span<const EvalReport> reports);

}  // namespace survcode::eval
