#include "doctest.h"

#include <set>
#include <sstream>

#include "support/temp_path.hpp"
#include "support/synthetic.hpp"
#include "survcode/dataset.hpp"
#include "survcode/error.hpp"

using namespace survcode;
using namespace survcode::data;

namespace {

Dataset parse(const std::string& csv, DatasetSpec spec = {}) {
  std::istringstream in(csv);
  return parse_dataset(in, spec, "test.csv");
}

std::string error_of(const std::string& csv) {
  try {
    parse(csv);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("records and labels") {
  const auto d = parse("id,text,labels\n7,\"egoismus\",2400\n8,\"Integration, Rente\",3750;3740\n");
  CHECK(d.size() == 2);
  CHECK(d.space().codes() == std::vector<std::string>{"2400", "3740", "3750"});
  CHECK(to_codes(d.at("7").labels, d.space()) == std::vector<std::string>{"2400"});
  CHECK(to_codes(d.at("8").labels, d.space()) == std::vector<std::string>{"3740", "3750"});
  CHECK(d.at("8").text == "Integration, Rente");
  CHECK(d.ids() == std::vector<std::string>{"7", "8"});
}

TEST_CASE("csv quoting, BOM, CRLF and custom columns") {
  const auto d = parse("\xEF\xBB\xBF" "code;answer;nr\r\n\"a;b\";\"er sagte \"\"nein\"\"\nzwei\";1\r\n",
                       DatasetSpec{.path = "", .id_column = "nr", .text_column = "answer", .labels_column = "code", .label_delimiter = '|', .field_delimiter = ';', .label_codes = {}});
  CHECK(d.size() == 1);
  CHECK(d.at("1").text == "er sagte \"nein\"\nzwei");
  CHECK(d.space().codes() == std::vector<std::string>{"a;b"});
}

TEST_CASE("descriptive data errors") {
  const auto dup = error_of("id,text,labels\n1,a,2\n1,b,3\n");
  CHECK(dup.find("duplicate id '1'") != std::string::npos);
  CHECK(dup.find("2") != std::string::npos);
  CHECK(dup.find("3") != std::string::npos);
  CHECK(error_of("id,text\n1,a\n").find("missing column 'labels'") != std::string::npos);
  CHECK(error_of("id,text,labels\n1,a,\n").find("empty label field") != std::string::npos);
  CHECK(error_of("id,text,labels\n1,a,2\n2,b\n").find(":3") != std::string::npos);
  CHECK(error_of("id,text,labels\n1,\"open,2\n").find("unterminated") != std::string::npos);
  DatasetSpec fixed;
  fixed.label_codes = {"2", "3"};
  CHECK_THROWS_WITH_AS(parse("id,text,labels\n1,a,9\n", fixed), doctest::Contains("unknown label code '9'"), DataError);
  CHECK_THROWS_AS(load_dataset(DatasetSpec{.path = "no/such/file.csv", .label_codes = {}}), IoError);
}

TEST_CASE("label space ordering") {
  CHECK(LabelSpace::from_observed({"100", "20", "3"}).codes() == std::vector<std::string>{"3", "20", "100"});
  CHECK(LabelSpace::from_observed({"b", "a", "10"}).codes() == std::vector<std::string>{"10", "a", "b"});
  CHECK_THROWS_AS(LabelSpace(std::vector<std::string>{"1", "1"}), InvalidArgument);
  CHECK_THROWS_AS(LabelSpace(std::vector<std::string>{"1"}).index_of("2"), DataError);
  CHECK(symmetric_difference_size(LabelSet{0, 1, 2}, LabelSet{2, 3}) == 3);
}

TEST_CASE("dataset statistics") {
  // Hand fixture: cardinalities 1,2,1,3,1; labelsets {a},{a,b},{a},{a,b,c},{c}.
  const auto d = parse(
      "id,text,labels\n1,x,a\n2,x,a;b\n3,,a\n4,x,a;b;c\n5,x,c\n");
  const auto s = dataset_stats(d);
  CHECK(s.n_records == 5);
  CHECK(s.n_labels == 3);
  CHECK(s.n_observed_labels == 3);
  CHECK(s.cardinality == doctest::Approx(8.0 / 5.0));
  CHECK(s.multi_label_percent == doctest::Approx(40.0));
  CHECK(s.max_labels == 3);
  CHECK(s.n_unique_labelsets == 4);
  CHECK(s.n_empty_text == 1);
  REQUIRE(s.top_labels.size() == 3);
  CHECK(s.top_labels[0].code == "a");
  CHECK(s.top_labels[0].count == 4);
  CHECK(stats_to_json(s).find("\"cardinality\"") != std::string::npos);
  CHECK(format_stats(s).find("records") != std::string::npos);

  const auto single = parse("id,text,labels\n1,x,a\n2,x,b\n");
  CHECK(dataset_stats(single).cardinality == 1.0);
  CHECK(dataset_stats(single).multi_label_percent == 0.0);
}

TEST_CASE("seeded splits") {
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back("r" + std::to_string(i));
  SplitConfig cfg;
  const auto a = make_split(ids, cfg);
  CHECK(a.train.size() == 6);
  CHECK(a.validation.size() == 2);
  CHECK(a.test.size() == 2);
  const auto b = make_split(ids, cfg);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);
  cfg.seed = 2;
  const auto c = make_split(ids, cfg);
  CHECK((a.train != c.train || a.validation != c.validation));

  std::set<std::string> all(a.train.begin(), a.train.end());
  all.insert(a.validation.begin(), a.validation.end());
  all.insert(a.test.begin(), a.test.end());
  CHECK(all.size() == 10);

  CHECK_THROWS_AS(make_split(std::vector<std::string>{"a", "b"}, SplitConfig{}), DataError);
  CHECK_THROWS_AS(make_split(ids, SplitConfig{0.5, 0.5, 0.5, 1}), InvalidArgument);
}

TEST_CASE("split files round-trip and are checked") {
  const auto d = testing::disjoint_corpus(30, 1);
  const auto split = make_split(d, SplitConfig{});
  const auto back = split_from_json(split_to_json(split));
  CHECK(back.train == split.train);
  CHECK(back.test == split.test);
  CHECK(back.config.seed == split.config.seed);
  CHECK_NOTHROW(check_split(back, d));
  auto broken = back;
  broken.test.push_back(broken.train.front());
  CHECK_THROWS_AS(check_split(broken, d), DataError);
  broken = back;
  broken.test.pop_back();
  CHECK_THROWS_AS(check_split(broken, d), DataError);
  CHECK_THROWS_AS(split_from_json("{\"format\":\"other\"}"), ParseError);
  CHECK_THROWS_AS(split_from_json("not json"), ParseError);
  write_split(survcode::testing::temp_path("split_test.json"), split);
  CHECK(read_split(survcode::testing::temp_path("split_test.json")).validation == split.validation);
}

TEST_CASE("property: split partitions for many sizes and seeds") {
  for (std::size_t n = 3; n < 60; ++n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    for (std::uint64_t seed = 1; seed < 5; ++seed) {
      SplitConfig cfg;
      cfg.seed = seed;
      Split s;
      try {
        s = make_split(ids, cfg);
      } catch (const DataError&) {
        continue;
      }
      std::set<std::string> all(s.train.begin(), s.train.end());
      all.insert(s.validation.begin(), s.validation.end());
      all.insert(s.test.begin(), s.test.end());
      CHECK(all.size() == n);
      CHECK(s.train.size() + s.validation.size() + s.test.size() == n);
      CHECK(!s.test.empty());
    }
  }
}
