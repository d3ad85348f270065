#include "survcode/eval.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include "survcode/error.hpp"

namespace survcode::eval {
namespace {

const LabelSet& truth_of(const PredictionRecord& record) {
  if (!record.truth) throw DataError("record '" + record.id + "' has no ground truth");
  if (record.truth->empty()) {
    throw DataError("record '" + record.id + "' has an empty ground-truth set");
  }
  return *record.truth;
}

void require_records(std::span<const PredictionRecord> records) {
  if (records.empty()) throw InvalidArgument("no records to evaluate");
}

void require_aligned(std::span<const LabelSet> a, std::span<const LabelSet> b) {
  if (a.size() != b.size()) throw InvalidArgument("codings cover different record counts");
  if (a.empty()) throw InvalidArgument("no records to compare");
}

}  // namespace

double zero_one_loss(std::span<const PredictionRecord> records) {
  require_records(records);
  std::size_t wrong = 0;
  for (const auto& r : records) wrong += r.predicted != truth_of(r) ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(records.size());
}

double hamming_loss(std::span<const PredictionRecord> records, std::size_t n_labels) {
  require_records(records);
  if (n_labels == 0) throw InvalidArgument("empty label space");
  double total = 0.0;
  for (const auto& r : records) {
    total += static_cast<double>(symmetric_difference_size(r.predicted, truth_of(r))) /
             static_cast<double>(n_labels);
  }
  return total / static_cast<double>(records.size());
}

std::map<std::size_t, std::size_t> true_count_sizes(std::span<const PredictionRecord> records) {
  std::map<std::size_t, std::size_t> sizes;
  for (const auto& r : records) ++sizes[truth_of(r).size()];
  return sizes;
}

std::map<std::size_t, double> loss_by_true_count(std::span<const PredictionRecord> records) {
  require_records(records);
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> strata;  // wrong, total
  for (const auto& r : records) {
    auto& [wrong, total] = strata[truth_of(r).size()];
    wrong += r.predicted != *r.truth ? 1 : 0;
    ++total;
  }
  std::map<std::size_t, double> out;
  for (const auto& [k, counts] : strata) {
    out[k] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return out;
}

std::map<std::size_t, double> predicted_count_distribution(
    std::span<const PredictionRecord> records) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& r : records) ++counts[r.predicted.size()];
  std::map<std::size_t, double> out;
  for (const auto& [k, n] : counts) {
    out[k] = 100.0 * static_cast<double>(n) / static_cast<double>(records.size());
  }
  return out;
}

double cohen_kappa(const std::vector<std::vector<double>>& table) {
  const std::size_t k = table.size();
  double n = 0.0;
  std::vector<double> rows(k, 0.0);
  std::vector<double> cols(k, 0.0);
  double diagonal = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (table[i].size() != k) throw InvalidArgument("agreement table must be square");
    for (std::size_t j = 0; j < k; ++j) {
      rows[i] += table[i][j];
      cols[j] += table[i][j];
      n += table[i][j];
    }
    diagonal += table[i][i];
  }
  if (!(n > 0.0)) throw InvalidArgument("empty agreement table");
  const double observed = diagonal / n;
  double chance = 0.0;
  for (std::size_t i = 0; i < k; ++i) chance += rows[i] * cols[i];
  chance /= n * n;
  if (std::abs(1.0 - chance) < 1e-15) {
    if (std::abs(1.0 - observed) < 1e-15) return 1.0;
    throw DataError("degenerate marginals");
  }
  return (observed - chance) / (1.0 - chance);
}

double kappa_label_level(std::span<const LabelSet> coder1, std::span<const LabelSet> coder2,
                         std::size_t n_labels) {
  require_aligned(coder1, coder2);
  if (n_labels == 0) throw InvalidArgument("empty label space");
  // table[a][b]: a = coder 1 includes, b = coder 2 includes.
  std::vector<std::vector<double>> table(2, std::vector<double>(2, 0.0));
  for (std::size_t r = 0; r < coder1.size(); ++r) {
    for (std::size_t label = 0; label < n_labels; ++label) {
      const auto l = static_cast<LabelIndex>(label);
      table[coder1[r].contains(l) ? 1 : 0][coder2[r].contains(l) ? 1 : 0] += 1.0;
    }
  }
  return cohen_kappa(table);
}

double kappa_answer_level(std::span<const LabelSet> coder1, std::span<const LabelSet> coder2) {
  require_aligned(coder1, coder2);
  std::map<LabelSet, std::size_t> categories;
  for (const auto& s : coder1) categories.emplace(s, 0);
  for (const auto& s : coder2) categories.emplace(s, 0);
  std::size_t next = 0;
  for (auto& [set, index] : categories) index = next++;
  std::vector<std::vector<double>> table(next, std::vector<double>(next, 0.0));
  for (std::size_t r = 0; r < coder1.size(); ++r) {
    table[categories.at(coder1[r])][categories.at(coder2[r])] += 1.0;
  }
  return cohen_kappa(table);
}

EvalReport evaluate(std::span<const PredictionRecord> records, std::size_t n_labels) {
  EvalReport report;
  report.model_tag = records.empty() ? std::string() : records.front().model_tag;
  report.n_records = records.size();
  report.n_labels = n_labels;
  report.zero_one = zero_one_loss(records);
  report.hamming = hamming_loss(records, n_labels);
  report.zero_one_by_true_count = loss_by_true_count(records);
  report.records_by_true_count = true_count_sizes(records);
  report.predicted_count_distribution = predicted_count_distribution(records);
  return report;
}

std::string report_to_json(const EvalReport& report, int indent) {
  nlohmann::ordered_json j;
  j["model_tag"] = report.model_tag;
  j["n_records"] = report.n_records;
  j["n_labels"] = report.n_labels;
  j["zero_one_loss"] = report.zero_one;
  j["hamming_loss"] = report.hamming;
  nlohmann::ordered_json by_count = nlohmann::ordered_json::object();
  for (const auto& [k, loss] : report.zero_one_by_true_count) {
    by_count[std::to_string(k)] = {{"loss", loss}, {"n", report.records_by_true_count.at(k)}};
  }
  j["zero_one_by_true_count"] = by_count;
  nlohmann::ordered_json dist = nlohmann::ordered_json::object();
  for (const auto& [k, pct] : report.predicted_count_distribution) dist[std::to_string(k)] = pct;
  j["predicted_count_distribution"] = dist;
  return j.dump(indent);
}

std::string format_tables(std::span<const EvalReport> reports) {
  std::set<std::size_t> true_counts;
  std::set<std::size_t> predicted_counts;
  std::size_t tag_width = 6;
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.zero_one_by_true_count) true_counts.insert(k);
    for (const auto& [k, v] : r.predicted_count_distribution) predicted_counts.insert(k);
    tag_width = std::max(tag_width, r.model_tag.size());
  }
  std::ostringstream out;
  out << std::fixed;
  out << "0/1 loss by true number of labels\n";
  out << std::left << std::setw(static_cast<int>(tag_width)) << "method" << std::right
      << std::setw(10) << "overall" << std::setw(10) << "hamming";
  for (std::size_t k : true_counts) out << std::setw(9) << k;
  out << '\n';
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(tag_width)) << r.model_tag << std::right
        << std::setprecision(4) << std::setw(10) << r.zero_one << std::setw(10) << r.hamming;
    for (std::size_t k : true_counts) {
      const auto it = r.zero_one_by_true_count.find(k);
      if (it == r.zero_one_by_true_count.end()) {
        out << std::setw(9) << "-";
      } else {
        out << std::setw(9) << it->second;
      }
    }
    out << '\n';
  }
  if (!reports.empty()) {
    out << std::left << std::setw(static_cast<int>(tag_width)) << "n" << std::right
        << std::setw(10) << reports.front().n_records << std::setw(10) << "";
    for (std::size_t k : true_counts) {
      const auto it = reports.front().records_by_true_count.find(k);
      out << std::setw(9) << (it == reports.front().records_by_true_count.end() ? 0 : it->second);
    }
    out << '\n';
  }
  out << "\nDistribution of the number of predicted labels (%)\n";
  out << std::left << std::setw(static_cast<int>(tag_width)) << "method" << std::right;
  for (std::size_t k : predicted_counts) out << std::setw(8) << k;
  out << '\n';
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(tag_width)) << r.model_tag << std::right
        << std::setprecision(1);
    for (std::size_t k : predicted_counts) {
      const auto it = r.predicted_count_distribution.find(k);
      out << std::setw(8) << (it == r.predicted_count_distribution.end() ? 0.0 : it->second);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace survcode::eval
