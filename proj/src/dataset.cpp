#include "survcode/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "survcode/error.hpp"
#include "survcode/io.hpp"
#include "survcode/rng.hpp"

namespace survcode::data {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t column_index(const CsvRow& header, const std::string& name, const std::string& source) {
  const auto it = std::find(header.fields.begin(), header.fields.end(), name);
  if (it == header.fields.end()) {
    throw DataError(source + ": missing column '" + name + "' in header");
  }
  return static_cast<std::size_t>(it - header.fields.begin());
}

}  // namespace

Dataset::Dataset(std::vector<Record> records, LabelSpace space)
    : records_(std::move(records)), space_(std::move(space)) {
  position_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!position_.emplace(records_[i].id, i).second) {
      throw DataError("duplicate id '" + records_[i].id + "'");
    }
  }
}

const Record& Dataset::at(const std::string& id) const {
  const auto it = position_.find(id);
  if (it == position_.end()) throw DataError("unknown record id '" + id + "'");
  return records_[it->second];
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.id);
  return out;
}

std::vector<CsvRow> parse_csv(std::istream& in, char delimiter) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  row.line = 1;
  char c = 0;
  bool first_char = true;
  const auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    end_field();
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row = CsvRow{};
    row.line = line;
  };
  while (in.get(c)) {
    if (first_char) {
      first_char = false;
      // UTF-8 byte order mark.
      if (static_cast<unsigned char>(c) == 0xEF) {
        char b1 = 0;
        char b2 = 0;
        if (in.get(b1) && in.get(b2) && static_cast<unsigned char>(b1) == 0xBB &&
            static_cast<unsigned char>(b2) == 0xBF) {
          continue;
        }
        throw ParseError("invalid leading bytes in CSV input");
      }
    }
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started && field.empty()) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r') {
      if (in.peek() == '\n') continue;
      ++line;
      end_row();
    } else if (c == '\n') {
      ++line;
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field starting on line " + std::to_string(row.line));
  if (!field.empty() || !row.fields.empty()) end_row();
  return rows;
}

Dataset parse_dataset(std::istream& in, const DatasetSpec& spec, const std::string& source) {
  const auto rows = parse_csv(in, spec.field_delimiter);
  if (rows.empty()) throw DataError(source + ": empty file");
  const CsvRow& header = rows.front();
  const std::size_t id_col = column_index(header, spec.id_column, source);
  const std::size_t text_col = column_index(header, spec.text_column, source);
  const std::size_t labels_col = column_index(header, spec.labels_column, source);

  struct Raw {
    std::size_t line;
    std::string id;
    std::string text;
    std::vector<std::string> codes;
  };
  std::vector<Raw> raw;
  raw.reserve(rows.size() - 1);
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = source + ":" + std::to_string(row.line);
    if (row.fields.size() != header.fields.size()) {
      throw ParseError(where + ": expected " + std::to_string(header.fields.size()) +
                       " fields, found " + std::to_string(row.fields.size()));
    }
    Raw entry{row.line, trim(row.fields[id_col]), row.fields[text_col], {}};
    if (entry.id.empty()) throw DataError(where + ": empty id");
    if (const auto [it, inserted] = seen.emplace(entry.id, row.line); !inserted) {
      throw DataError(source + ": duplicate id '" + entry.id + "' on lines " +
                      std::to_string(it->second) + " and " + std::to_string(row.line));
    }
    std::string_view labels = row.fields[labels_col];
    std::size_t start = 0;
    while (start <= labels.size()) {
      auto end = labels.find(spec.label_delimiter, start);
      if (end == std::string_view::npos) end = labels.size();
      std::string code = trim(labels.substr(start, end - start));
      if (!code.empty()) entry.codes.push_back(std::move(code));
      start = end + 1;
    }
    if (entry.codes.empty()) throw DataError(where + ": empty label field for id '" + entry.id + "'");
    raw.push_back(std::move(entry));
  }

  LabelSpace space;
  if (!spec.label_codes.empty()) {
    space = LabelSpace(spec.label_codes);
  } else {
    std::vector<std::string> observed;
    for (const auto& entry : raw) observed.insert(observed.end(), entry.codes.begin(), entry.codes.end());
    space = LabelSpace::from_observed(std::move(observed));
  }

  std::vector<Record> records;
  records.reserve(raw.size());
  for (auto& entry : raw) {
    LabelSet labels;
    for (const auto& code : entry.codes) {
      if (!space.contains(code)) {
        throw DataError(source + ":" + std::to_string(entry.line) + ": unknown label code '" +
                        code + "'");
      }
      labels.insert(space.index_of(code));
    }
    records.push_back(Record{std::move(entry.id), std::move(entry.text), std::move(labels)});
  }
  return Dataset(std::move(records), std::move(space));
}

Dataset load_dataset(const DatasetSpec& spec) {
  std::ifstream in(spec.path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + spec.path + "'");
  return parse_dataset(in, spec, spec.path);
}

DatasetStats dataset_stats(const Dataset& dataset, std::size_t top_k) {
  DatasetStats stats;
  stats.n_records = dataset.size();
  stats.n_labels = dataset.space().size();
  std::vector<std::size_t> freq(dataset.space().size(), 0);
  std::set<LabelSet> unique;
  std::size_t total = 0;
  std::size_t multi = 0;
  for (const auto& r : dataset.records()) {
    total += r.labels.size();
    multi += r.labels.size() > 1 ? 1 : 0;
    stats.max_labels = std::max(stats.max_labels, r.labels.size());
    stats.n_empty_text += r.text.find_first_not_of(" \t\r\n") == std::string::npos ? 1 : 0;
    unique.insert(r.labels);
    for (LabelIndex label : r.labels) ++freq[label];
  }
  stats.n_unique_labelsets = unique.size();
  stats.n_observed_labels =
      static_cast<std::size_t>(std::count_if(freq.begin(), freq.end(), [](auto f) { return f > 0; }));
  if (stats.n_records > 0) {
    const auto n = static_cast<double>(stats.n_records);
    stats.cardinality = static_cast<double>(total) / n;
    stats.multi_label_percent = 100.0 * static_cast<double>(multi) / n;
  }
  std::vector<std::size_t> order(freq.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return freq[a] > freq[b]; });
  for (std::size_t k = 0; k < std::min(top_k, order.size()); ++k) {
    if (freq[order[k]] == 0) break;
    stats.top_labels.push_back({dataset.space().code(static_cast<LabelIndex>(order[k])), freq[order[k]]});
  }
  return stats;
}

std::string stats_to_json(const DatasetStats& stats, int indent) {
  nlohmann::ordered_json j;
  j["n_records"] = stats.n_records;
  j["n_labels"] = stats.n_labels;
  j["n_observed_labels"] = stats.n_observed_labels;
  j["cardinality"] = stats.cardinality;
  j["multi_label_percent"] = stats.multi_label_percent;
  j["max_labels"] = stats.max_labels;
  j["n_unique_labelsets"] = stats.n_unique_labelsets;
  j["n_empty_text"] = stats.n_empty_text;
  j["top_labels"] = nlohmann::ordered_json::array();
  for (const auto& lc : stats.top_labels) j["top_labels"].push_back({{"code", lc.code}, {"count", lc.count}});
  return j.dump(indent);
}

std::string format_stats(const DatasetStats& stats) {
  std::ostringstream out;
  out << std::fixed;
  out << "records            " << stats.n_records << '\n'
      << "labels             " << stats.n_labels << " (" << stats.n_observed_labels << " observed)\n"
      << "cardinality        " << std::setprecision(2) << stats.cardinality << '\n'
      << "multi-label        " << std::setprecision(1) << stats.multi_label_percent << "%\n"
      << "max labels         " << stats.max_labels << '\n'
      << "unique labelsets   " << stats.n_unique_labelsets << '\n'
      << "empty answers      " << stats.n_empty_text << '\n';
  if (!stats.top_labels.empty()) {
    out << "top labels\n";
    for (const auto& lc : stats.top_labels) {
      out << "  " << std::left << std::setw(10) << lc.code << std::right << std::setw(8) << lc.count
          << "  " << std::setprecision(2)
          << 100.0 * static_cast<double>(lc.count) / static_cast<double>(stats.n_records) << "%\n";
    }
  }
  return out.str();
}

void SplitConfig::validate() const {
  const bool positive = train > 0.0 && validation > 0.0 && test > 0.0;
  if (!positive || std::abs(train + validation + test - 1.0) > 1e-9) {
    throw InvalidArgument("split fractions must be positive and sum to 1");
  }
}

Split make_split(std::vector<std::string> ids, const SplitConfig& config) {
  config.validate();
  const std::size_t n = ids.size();
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * config.train));
  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * config.validation));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw DataError("too few records (" + std::to_string(n) + ") to populate train, validation and test");
  }
  Rng rng(config.seed);
  rng.shuffle(std::span<std::string>(ids));
  Split split;
  split.config = config;
  split.train.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
  split.validation.assign(ids.begin() + static_cast<long>(n_train),
                          ids.begin() + static_cast<long>(n_train + n_val));
  split.test.assign(ids.begin() + static_cast<long>(n_train + n_val), ids.end());
  return split;
}

Split make_split(const Dataset& dataset, const SplitConfig& config) {
  return make_split(dataset.ids(), config);
}

void check_split(const Split& split, const Dataset& dataset) {
  std::unordered_set<std::string> seen;
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (const auto& id : *part) {
      if (!dataset.contains(id)) throw DataError("split references unknown id '" + id + "'");
      if (!seen.insert(id).second) throw DataError("split lists id '" + id + "' twice");
    }
  }
  if (seen.size() != dataset.size()) {
    throw DataError("split covers " + std::to_string(seen.size()) + " of " +
                    std::to_string(dataset.size()) + " records");
  }
}

std::string split_to_json(const Split& split) {
  nlohmann::ordered_json j;
  j["format"] = "survcode-split";
  j["version"] = 1;
  j["seed"] = split.config.seed;
  j["fractions"] = {{"train", split.config.train},
                    {"validation", split.config.validation},
                    {"test", split.config.test}};
  j["train"] = split.train;
  j["validation"] = split.validation;
  j["test"] = split.test;
  return j.dump(1) + "\n";
}

Split split_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "survcode-split") throw ParseError("not a split file");
    Split split;
    split.config.seed = j.at("seed").get<std::uint64_t>();
    split.config.train = j.at("fractions").at("train").get<double>();
    split.config.validation = j.at("fractions").at("validation").get<double>();
    split.config.test = j.at("fractions").at("test").get<double>();
    split.train = j.at("train").get<std::vector<std::string>>();
    split.validation = j.at("validation").get<std::vector<std::string>>();
    split.test = j.at("test").get<std::vector<std::string>>();
    return split;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("split file: ") + e.what());
  }
}

void write_split(const std::string& path, const Split& split) {
  io::write_file_atomic(path, split_to_json(split));
}

Split read_split(const std::string& path) { return split_from_json(io::read_file(path)); }

}  // namespace survcode::data
