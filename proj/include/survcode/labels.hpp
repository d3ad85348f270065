#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <unordered_map>
#include <vector>

namespace survcode {

using LabelIndex = std::uint32_t;

// Ordered list of label codes ("3750", "2400", ...). Order is fixed when the
// space is built and indexes every per-label vector in the toolkit.
class LabelSpace {
 public:
  LabelSpace() = default;
  // Throws InvalidArgument on duplicate codes.
  explicit LabelSpace(std::vector<std::string> codes);

  // Codes sorted numerically when every code is an integer, lexically
  // otherwise.
  static LabelSpace from_observed(std::vector<std::string> codes);

  std::size_t size() const { return codes_.size(); }
  const std::vector<std::string>& codes() const { return codes_; }
  const std::string& code(LabelIndex index) const { return codes_.at(index); }
  bool contains(const std::string& code) const { return index_.contains(code); }
  // Throws DataError for an unknown code.
  LabelIndex index_of(const std::string& code) const;

  friend bool operator==(const LabelSpace& a, const LabelSpace& b) {
    return a.codes_ == b.codes_;
  }

 private:
  std::vector<std::string> codes_;
  std::unordered_map<std::string, LabelIndex> index_;
};

// Set of label indices, kept sorted and unique.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::initializer_list<LabelIndex> labels) : labels_(labels) { canonicalize(); }
  explicit LabelSet(std::vector<LabelIndex> labels) : labels_(std::move(labels)) {
    canonicalize();
  }

  void insert(LabelIndex label) {
    const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) labels_.insert(it, label);
  }
  bool contains(LabelIndex label) const {
    return std::binary_search(labels_.begin(), labels_.end(), label);
  }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<LabelIndex>& items() const { return labels_; }
  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
  friend auto operator<=>(const LabelSet&, const LabelSet&) = default;

 private:
  void canonicalize() {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  }
  std::vector<LabelIndex> labels_;
};

std::size_t symmetric_difference_size(const LabelSet& a, const LabelSet& b);

// Codes of a set, in label-space order.
std::vector<std::string> to_codes(const LabelSet& set, const LabelSpace& space);

}  // namespace survcode
