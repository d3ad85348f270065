#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "survcode/labels.hpp"

namespace survcode::data {

struct DatasetSpec {
  std::string path;
  std::string id_column = "id";
  std::string text_column = "text";
  std::string labels_column = "labels";
  char label_delimiter = ';';
  char field_delimiter = ',';
  // When non-empty this fixes the label space; otherwise it is the union of
  // observed codes.
  std::vector<std::string> label_codes;
};

struct Record {
  std::string id;
  std::string text;
  LabelSet labels;
};

class Dataset {
 public:
  Dataset() = default;
  // Throws DataError on duplicate ids.
  Dataset(std::vector<Record> records, LabelSpace space);

  const std::vector<Record>& records() const { return records_; }
  const LabelSpace& space() const { return space_; }
  std::size_t size() const { return records_.size(); }
  bool contains(const std::string& id) const { return position_.contains(id); }
  // Throws DataError for an unknown id.
  const Record& at(const std::string& id) const;
  std::vector<std::string> ids() const;

 private:
  std::vector<Record> records_;
  LabelSpace space_;
  std::unordered_map<std::string, std::size_t> position_;
};

// Splits CSV text into rows of fields (RFC 4180 quoting). Each row carries
// the 1-based line number it starts on.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::istream& in, char delimiter);

Dataset parse_dataset(std::istream& in, const DatasetSpec& spec, const std::string& source = "<input>");
Dataset load_dataset(const DatasetSpec& spec);

struct LabelCount {
  std::string code;
  std::size_t count = 0;
};

struct DatasetStats {
  std::size_t n_records = 0;
  std::size_t n_labels = 0;           // size of the label space
  std::size_t n_observed_labels = 0;  // codes used by at least one record
  double cardinality = 0.0;
  double multi_label_percent = 0.0;
  std::size_t max_labels = 0;
  std::size_t n_unique_labelsets = 0;
  std::size_t n_empty_text = 0;
  std::vector<LabelCount> top_labels;
};

DatasetStats dataset_stats(const Dataset& dataset, std::size_t top_k = 10);
std::string stats_to_json(const DatasetStats& stats, int indent = 2);
std::string format_stats(const DatasetStats& stats);

struct SplitConfig {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Split {
  SplitConfig config;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

// Seeded Fisher-Yates over ids in the given order, then contiguous cuts of
// round(n * train) and round(n * validation); the rest is test.
Split make_split(std::vector<std::string> ids, const SplitConfig& config);
Split make_split(const Dataset& dataset, const SplitConfig& config);

// Throws DataError unless the split partitions the dataset's ids exactly.
void check_split(const Split& split, const Dataset& dataset);

std::string split_to_json(const Split& split);
Split split_from_json(const std::string& text);
void write_split(const std::string& path, const Split& split);
Split read_split(const std::string& path);

}  // namespace survcode::data
