#include "doctest.h"

#include "support/temp_path.hpp"

#include <cmath>
#include <sstream>

#include "survcode/error.hpp"
#include "survcode/interchange.hpp"

using namespace survcode;
using namespace survcode::interchange;

namespace {

const LabelSpace kSpace(std::vector<std::string>{"2400", "3740", "3750"});

std::vector<eval::PredictionRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_predictions(in, kSpace, "preds.jsonl");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("adapter-style output parses") {
  const auto r = parse(
      "{\"id\":\"1\",\"model_tag\":\"bert\",\"predicted\":[\"2400\"],\"scores\":{\"2400\":0.9,\"3740\":0.2,\"3750\":0.1}}\n"
      "\n"
      "{\"id\":\"2\",\"model_tag\":\"bert\",\"predicted\":[\"3750\",\"3740\"]}\n"
      "{\"id\":\"3\",\"model_tag\":\"bert\",\"predicted\":[],\"scores\":{\"3740\":0.4}}\n");
  REQUIRE(r.size() == 3);
  CHECK(r[0].predicted == LabelSet{0});
  CHECK(r[0].scores == std::vector<double>{0.9, 0.2, 0.1});
  CHECK(r[1].predicted == LabelSet{1, 2});
  CHECK(r[1].scores.empty());
  CHECK(r[2].predicted.empty());
  CHECK(std::isinf(r[2].scores[0]));
  CHECK(r[2].scores[1] == 0.4);
  CHECK(r[2].model_tag == "bert");
}

TEST_CASE("errors name the line") {
  CHECK(error_of("{\"id\":\"1\",\"predicted\":[\"9999\"]}\n").find("9999") != std::string::npos);
  CHECK(error_of("{\"id\":\"1\",\"predicted\":[\"9999\"]}\n").find(":1") != std::string::npos);
  CHECK(error_of("{\"id\":\"1\",\"predicted\":[]}\n{\"id\":\"1\",\"predicted\":[]}\n").find(":2") !=
        std::string::npos);
  CHECK(error_of("{\"id\":\"1\",\"predicted\":[]}\n{broken\n").find(":2") != std::string::npos);
  CHECK(error_of("{\"predicted\":[]}\n").find(":1") != std::string::npos);
  CHECK(error_of("{\"id\":\"1\",\"predicted\":[],\"scores\":{\"1\":0.5}}\n").find("'1'") != std::string::npos);
  CHECK_THROWS_AS(import_predictions("no/such/file.jsonl", kSpace), IoError);
}

TEST_CASE("format and parse round-trip") {
  std::vector<eval::PredictionRecord> records = {
      {"a", {0, 2}, std::nullopt, {0.125, -1.5, 3.0e-17}, "ecc"},
      {"b", {}, std::nullopt, {}, "lp"},
  };
  const auto text = format_records(records, kSpace);
  CHECK(text.find("\"predicted\":[\"2400\",\"3750\"]") != std::string::npos);
  const auto back = parse(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].predicted == records[0].predicted);
  CHECK(back[0].scores == records[0].scores);
  CHECK(back[1].scores.empty());
  CHECK(format_records(back, kSpace) == text);

  write_predictions(survcode::testing::temp_path("interchange_test.jsonl"), records, kSpace);
  CHECK(import_predictions(survcode::testing::temp_path("interchange_test.jsonl"), kSpace).size() == 2);
}

TEST_CASE("truth attachment") {
  data::Dataset d({{"a", "x", {1}}}, kSpace);
  auto r = parse("{\"id\":\"a\",\"predicted\":[\"3740\"]}\n");
  attach_truth(r, d);
  CHECK(r[0].truth == LabelSet{1});
  auto missing = parse("{\"id\":\"zz\",\"predicted\":[]}\n");
  CHECK_THROWS_AS(attach_truth(missing, d), DataError);
}
