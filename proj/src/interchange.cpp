#include "survcode/interchange.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "survcode/error.hpp"
#include "survcode/io.hpp"

namespace survcode::interchange {
namespace {

std::string code_of(const nlohmann::json& value, const std::string& where) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw ParseError(where + ": label codes must be strings");
}

}  // namespace

std::string format_record(const eval::PredictionRecord& record, const LabelSpace& space) {
  nlohmann::ordered_json j;
  j["id"] = record.id;
  j["model_tag"] = record.model_tag;
  j["predicted"] = to_codes(record.predicted, space);
  if (!record.scores.empty()) {
    if (record.scores.size() != space.size()) {
      throw InvalidArgument("record '" + record.id + "': scores do not match the label space");
    }
    nlohmann::ordered_json scores = nlohmann::ordered_json::object();
    for (std::size_t label = 0; label < space.size(); ++label) {
      if (std::isfinite(record.scores[label])) {
        scores[space.code(static_cast<LabelIndex>(label))] = record.scores[label];
      }
    }
    j["scores"] = scores;
  }
  return j.dump();
}

std::string format_records(std::span<const eval::PredictionRecord> records, const LabelSpace& space) {
  std::string out;
  for (const auto& record : records) {
    out += format_record(record, space);
    out += '\n';
  }
  return out;
}

void write_predictions(const std::string& path, std::span<const eval::PredictionRecord> records,
                       const LabelSpace& space) {
  io::write_file_atomic(path, format_records(records, space));
}

std::vector<eval::PredictionRecord> parse_predictions(std::istream& in, const LabelSpace& space,
                                                      const std::string& source) {
  std::vector<eval::PredictionRecord> records;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
    if (!j.contains("id") || !j["id"].is_string()) throw ParseError(where + ": missing string field 'id'");
    if (!j.contains("predicted") || !j["predicted"].is_array()) {
      throw ParseError(where + ": missing array field 'predicted'");
    }
    eval::PredictionRecord record;
    record.id = j["id"].get<std::string>();
    if (j.contains("model_tag")) {
      if (!j["model_tag"].is_string()) throw ParseError(where + ": 'model_tag' must be a string");
      record.model_tag = j["model_tag"].get<std::string>();
    }
    for (const auto& value : j["predicted"]) {
      const std::string code = code_of(value, where);
      if (!space.contains(code)) throw DataError(where + ": unknown label code '" + code + "'");
      record.predicted.insert(space.index_of(code));
    }
    if (j.contains("scores") && !j["scores"].is_null()) {
      if (!j["scores"].is_object()) throw ParseError(where + ": 'scores' must be an object");
      record.scores.assign(space.size(), -std::numeric_limits<double>::infinity());
      for (const auto& [code, value] : j["scores"].items()) {
        if (!space.contains(code)) throw DataError(where + ": unknown label code '" + code + "' in scores");
        if (!value.is_number()) throw ParseError(where + ": score for '" + code + "' is not a number");
        record.scores[space.index_of(code)] = value.get<double>();
      }
    }
    if (!ids.insert(record.id).second) throw DataError(where + ": duplicate id '" + record.id + "'");
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<eval::PredictionRecord> import_predictions(const std::string& path,
                                                       const LabelSpace& space) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open predictions '" + path + "'");
  return parse_predictions(in, space, path);
}

void attach_truth(std::vector<eval::PredictionRecord>& records, const data::Dataset& dataset) {
  for (auto& record : records) record.truth = dataset.at(record.id).labels;
}

}  // namespace survcode::interchange
