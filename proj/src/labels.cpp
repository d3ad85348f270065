#include "survcode/labels.hpp"

#include <charconv>

#include "survcode/error.hpp"

namespace survcode {
namespace {

bool parse_integer(const std::string& s, long long& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

LabelSpace::LabelSpace(std::vector<std::string> codes) : codes_(std::move(codes)) {
  index_.reserve(codes_.size());
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    if (codes_[i].empty()) throw InvalidArgument("empty label code");
    if (!index_.emplace(codes_[i], static_cast<LabelIndex>(i)).second) {
      throw InvalidArgument("duplicate label code '" + codes_[i] + "'");
    }
  }
}

LabelSpace LabelSpace::from_observed(std::vector<std::string> codes) {
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  std::vector<long long> numeric(codes.size());
  bool all_numeric = true;
  for (std::size_t i = 0; i < codes.size() && all_numeric; ++i) {
    all_numeric = parse_integer(codes[i], numeric[i]);
  }
  if (all_numeric) {
    std::vector<std::size_t> order(codes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return numeric[a] < numeric[b]; });
    std::vector<std::string> sorted;
    sorted.reserve(codes.size());
    for (std::size_t i : order) sorted.push_back(codes[i]);
    codes = std::move(sorted);
  }
  return LabelSpace(std::move(codes));
}

LabelIndex LabelSpace::index_of(const std::string& code) const {
  const auto it = index_.find(code);
  if (it == index_.end()) throw DataError("unknown label code '" + code + "'");
  return it->second;
}

std::size_t symmetric_difference_size(const LabelSet& a, const LabelSet& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) {
      ++i;
      ++j;
    } else if (*i < *j) {
      ++count;
      ++i;
    } else {
      ++count;
      ++j;
    }
  }
  count += static_cast<std::size_t>(std::distance(i, a.end()));
  count += static_cast<std::size_t>(std::distance(j, b.end()));
  return count;
}

std::vector<std::string> to_codes(const LabelSet& set, const LabelSpace& space) {
  std::vector<std::string> codes;
  codes.reserve(set.size());
  for (LabelIndex label : set) codes.push_back(space.code(label));
  return codes;
}

}  // namespace survcode
