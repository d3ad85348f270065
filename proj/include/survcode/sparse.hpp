#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace survcode {

// Sparse row over a feature space of size `dim`. Indices are strictly
// increasing and no explicit zeros are stored.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  // Appends an entry; callers must keep indices increasing.
  void push(std::uint32_t index, double value) {
    if (value == 0.0) return;
    indices.push_back(index);
    values.push_back(value);
  }

  double squared_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) {
      s += a.values[i++] * b.values[j++];
    } else if (a.indices[i] < b.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

inline double dot(const std::vector<double>& dense, const SparseVector& x) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    s += dense[x.indices[k]] * x.values[k];
  }
  return s;
}

// Copy of x living in a space of `new_dim` >= x.dim, with extra entries
// appended at indices >= x.dim.
inline SparseVector augment(const SparseVector& x, std::size_t new_dim,
                            const std::vector<std::pair<std::uint32_t, double>>& extra) {
  SparseVector out = x;
  out.dim = new_dim;
  for (const auto& [index, value] : extra) out.push(index, value);
  return out;
}

}  // namespace survcode
