#pragma once

#include <istream>
#include <span>
#include <string>
#include <vector>

#include "survcode/dataset.hpp"
#include "survcode/eval.hpp"
#include "survcode/labels.hpp"

namespace survcode::interchange {

// One JSON object per line:
//   {"id": "...", "model_tag": "...", "predicted": ["3750", ...],
//    "scores": {"2400": -0.31, ...}}
// "scores" is optional. Codes are label codes as strings.
std::string format_record(const eval::PredictionRecord& record, const LabelSpace& space);
std::string format_records(std::span<const eval::PredictionRecord> records, const LabelSpace& space);
void write_predictions(const std::string& path, std::span<const eval::PredictionRecord> records,
                       const LabelSpace& space);

// Blank lines are skipped. Malformed lines, unknown codes and duplicate ids
// raise ParseError/DataError naming the line. Labels missing from a partial
// "scores" object get -infinity.
std::vector<eval::PredictionRecord> parse_predictions(std::istream& in, const LabelSpace& space,
                                                      const std::string& source = "<input>");
std::vector<eval::PredictionRecord> import_predictions(const std::string& path,
                                                       const LabelSpace& space);

// Fills `truth` from the dataset; DataError for ids the dataset lacks.
void attach_truth(std::vector<eval::PredictionRecord>& records, const data::Dataset& dataset);

}  // namespace survcode::interchange
