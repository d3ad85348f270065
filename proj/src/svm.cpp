#include "survcode/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <map>
#include <memory>
#include <unordered_map>

#include "survcode/error.hpp"
#include "survcode/parallel.hpp"
#include "survcode/rng.hpp"

namespace survcode::svm {
namespace {

constexpr double kTau = 1e-12;

std::size_t common_dim(std::span<const SparseVector> X) {
  const std::size_t dim = X.front().dim;
  for (const auto& x : X) {
    if (x.dim != dim) throw InvalidArgument("training rows differ in dimension");
  }
  return dim;
}

void check_inputs(std::span<const SparseVector> X, std::span<const int> y) {
  if (X.size() != y.size()) throw InvalidArgument("X and y differ in length");
  if (X.empty()) throw InvalidArgument("empty training set");
  for (int label : y) {
    if (label != 1 && label != -1) throw InvalidArgument("binary labels must be +1 or -1");
  }
}

// Returns the shared label when y has a single class, 0 otherwise.
int single_class(std::span<const int> y) {
  const bool all_same = std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); });
  return all_same ? y.front() : 0;
}

// LRU cache of kernel matrix rows.
class KernelRows {
 public:
  KernelRows(std::span<const SparseVector> X, double gamma, std::size_t budget_bytes)
      : X_(X), gamma_(gamma) {
    sq_.reserve(X.size());
    for (const auto& x : X) sq_.push_back(x.squared_norm());
    const std::size_t row_bytes = std::max<std::size_t>(1, X.size() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  std::shared_ptr<const std::vector<double>> row(std::size_t i) {
    if (const auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    auto values = std::make_shared<std::vector<double>>(X_.size());
    for (std::size_t j = 0; j < X_.size(); ++j) {
      const double d2 = std::max(0.0, sq_[i] + sq_[j] - 2.0 * dot(X_[i], X_[j]));
      (*values)[j] = std::exp(-gamma_ * d2);
    }
    lru_.emplace_front(i, values);
    index_[i] = lru_.begin();
    if (lru_.size() > capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    return values;
  }

 private:
  using Entry = std::pair<std::size_t, std::shared_ptr<std::vector<double>>>;
  std::span<const SparseVector> X_;
  double gamma_;
  std::vector<double> sq_;
  std::size_t capacity_ = 2;
  std::list<Entry> lru_;
  std::unordered_map<std::size_t, std::list<Entry>::iterator> index_;
};

}  // namespace

const char* to_string(Kernel kernel) { return kernel == Kernel::linear ? "linear" : "rbf"; }

Kernel kernel_from_string(const std::string& name) {
  if (name == "linear") return Kernel::linear;
  if (name == "rbf") return Kernel::rbf;
  throw InvalidArgument("unknown kernel '" + name + "' (expected linear or rbf)");
}

void TrainConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be positive");
  if (kernel == Kernel::rbf && (!gamma || !(*gamma > 0.0) || !std::isfinite(*gamma))) {
    throw InvalidArgument("rbf kernel requires a positive gamma");
  }
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_iterations == 0) throw InvalidArgument("max_iterations must be positive");
}

BinaryModel BinaryModel::constant(std::size_t dim, int label) {
  BinaryModel model;
  model.kind = ModelKind::constant;
  model.dim = dim;
  model.bias = label > 0 ? 1.0 : -1.0;
  model.degenerate = true;
  return model;
}

void BinaryModel::finalize() {
  sv_squared_norms.clear();
  sv_squared_norms.reserve(support_vectors.size());
  for (const auto& sv : support_vectors) sv_squared_norms.push_back(sv.squared_norm());
}

BinaryModel train_binary(std::span<const SparseVector> X, std::span<const int> y,
                         const TrainConfig& cfg, TrainStats* stats) {
  return cfg.kernel == Kernel::linear ? train_linear_dcd(X, y, cfg, stats)
                                      : train_rbf_smo(X, y, cfg, stats);
}

BinaryModel train_linear_dcd(std::span<const SparseVector> X, std::span<const int> y,
                             const TrainConfig& cfg, TrainStats* stats) {
  cfg.validate();
  check_inputs(X, y);
  const std::size_t dim = common_dim(X);
  if (const int only = single_class(y)) {
    if (stats) *stats = TrainStats{0, true, 0.0, std::vector<double>(X.size(), 0.0), {}};
    return BinaryModel::constant(dim, only);
  }

  const std::size_t n = X.size();
  const double C = cfg.C;
  std::vector<double> w(dim, 0.0);
  double w_bias = 0.0;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = X[i].squared_norm() + 1.0;

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::size_t sweep = 0;
  bool converged = false;
  double violation = 0.0;
  std::vector<double> trace;
  while (sweep < cfg.max_iterations) {
    rng.shuffle(std::span<std::size_t>(order));
    violation = 0.0;
    for (std::size_t i : order) {
      const double yi = y[i];
      const double grad = yi * (dot(w, X[i]) + w_bias) - 1.0;
      double projected = grad;
      if (alpha[i] <= 0.0) {
        projected = std::min(grad, 0.0);
      } else if (alpha[i] >= C) {
        projected = std::max(grad, 0.0);
      }
      violation = std::max(violation, std::abs(projected));
      if (std::abs(projected) > kTau) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - grad / diag[i], 0.0, C);
        const double step = (alpha[i] - old) * yi;
        const auto& xi = X[i];
        for (std::size_t k = 0; k < xi.indices.size(); ++k) w[xi.indices[k]] += step * xi.values[k];
        w_bias += step;
      }
    }
    ++sweep;
    if (stats) {
      double sum_alpha = 0.0;
      for (double a : alpha) sum_alpha += a;
      double wnorm = w_bias * w_bias;
      for (double v : w) wnorm += v * v;
      trace.push_back(sum_alpha - 0.5 * wnorm);
    }
    if (violation < cfg.tolerance) {
      converged = true;
      break;
    }
  }

  if (stats) *stats = TrainStats{sweep, converged, violation, alpha, std::move(trace)};
  BinaryModel model;
  model.kind = ModelKind::linear;
  model.dim = dim;
  model.weights = std::move(w);
  model.bias = w_bias;
  return model;
}

BinaryModel train_rbf_smo(std::span<const SparseVector> X, std::span<const int> y,
                          const TrainConfig& cfg, TrainStats* stats) {
  cfg.validate();
  check_inputs(X, y);
  const std::size_t dim = common_dim(X);
  if (const int only = single_class(y)) {
    if (stats) *stats = TrainStats{0, true, 0.0, std::vector<double>(X.size(), 0.0), {}};
    return BinaryModel::constant(dim, only);
  }

  const std::size_t n = X.size();
  const double C = cfg.C;
  const double gamma = *cfg.gamma;
  KernelRows rows(X, gamma, cfg.cache_megabytes * 1024 * 1024);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  const auto yv = [&](std::size_t t) { return static_cast<double>(y[t]); };
  const auto at_upper = [&](std::size_t t) { return alpha[t] >= C; };
  const auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  const std::size_t budget = cfg.max_iterations * std::max<std::size_t>(n, 1);
  std::size_t iter = 0;
  bool converged = false;
  double violation = 0.0;
  std::vector<double> trace;

  while (iter < budget) {
    // Working set: i maximizes the first-order violation, j minimizes the
    // second-order objective decrease.
    double g_max = -std::numeric_limits<double>::infinity();
    long i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!at_upper(t) && -grad[t] >= g_max) {
          g_max = -grad[t];
          i_sel = static_cast<long>(t);
        }
      } else if (!at_lower(t) && grad[t] >= g_max) {
        g_max = grad[t];
        i_sel = static_cast<long>(t);
      }
    }
    if (i_sel < 0) {
      converged = true;
      break;
    }
    const auto i = static_cast<std::size_t>(i_sel);
    const auto row_i = rows.row(i);
    double g_max2 = -std::numeric_limits<double>::infinity();
    long j_sel = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double k_it = (*row_i)[t];
      if (y[t] == 1) {
        if (!at_lower(t)) {
          const double diff = g_max + grad[t];
          g_max2 = std::max(g_max2, grad[t]);
          if (diff > 0.0) {
            double quad = 2.0 - 2.0 * yv(i) * yv(i) * yv(t) * k_it;
            if (quad <= 0.0) quad = kTau;
            const double obj = -(diff * diff) / quad;
            if (obj <= best) {
              j_sel = static_cast<long>(t);
              best = obj;
            }
          }
        }
      } else if (!at_upper(t)) {
        const double diff = g_max - grad[t];
        g_max2 = std::max(g_max2, -grad[t]);
        if (diff > 0.0) {
          double quad = 2.0 + 2.0 * yv(i) * yv(i) * yv(t) * k_it;
          if (quad <= 0.0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best) {
            j_sel = static_cast<long>(t);
            best = obj;
          }
        }
      }
    }
    violation = g_max + g_max2;
    if (violation < cfg.tolerance || j_sel < 0) {
      converged = true;
      break;
    }
    const auto j = static_cast<std::size_t>(j_sel);
    const auto row_j = rows.row(j);

    const double q_ij = yv(i) * yv(j) * (*row_i)[j];
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    double ai = old_i;
    double aj = old_j;
    if (y[i] != y[j]) {
      double quad = 2.0 + 2.0 * q_ij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * q_ij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    alpha[i] = ai;
    alpha[j] = aj;
    const double d_i = ai - old_i;
    const double d_j = aj - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += yv(t) * (yv(i) * (*row_i)[t] * d_i + yv(j) * (*row_j)[t] * d_j);
    }
    ++iter;
    if (stats) {
      double obj = 0.0;
      for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (1.0 - grad[t]);
      trace.push_back(0.5 * obj);
    }
  }

  // Bias from free support vectors, or the midpoint of the feasible range.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = yv(t) * grad[t];
    if (at_upper(t)) {
      if (y[t] == -1) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (at_lower(t)) {
      if (y[t] == 1) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count)
                                    : (upper + lower) / 2.0;

  BinaryModel model;
  model.kind = ModelKind::rbf;
  model.dim = dim;
  model.gamma = gamma;
  model.bias = -rho;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.push_back(X[t]);
      model.coefficients.push_back(alpha[t] * yv(t));
    }
  }
  model.finalize();
  if (stats) *stats = TrainStats{iter, converged, violation, std::move(alpha), std::move(trace)};
  return model;
}

double rbf_kernel(const SparseVector& a, const SparseVector& b, double gamma) {
  const double d2 = std::max(0.0, a.squared_norm() + b.squared_norm() - 2.0 * dot(a, b));
  return std::exp(-gamma * d2);
}

double decision(const BinaryModel& model, const SparseVector& x) {
  if (x.dim != model.dim) {
    throw InvalidArgument("feature dimension mismatch: model expects " +
                          std::to_string(model.dim) + ", got " + std::to_string(x.dim));
  }
  switch (model.kind) {
    case ModelKind::constant:
      return model.bias;
    case ModelKind::linear:
      return dot(model.weights, x) + model.bias;
    case ModelKind::rbf: {
      const double xx = x.squared_norm();
      double sum = model.bias;
      for (std::size_t k = 0; k < model.support_vectors.size(); ++k) {
        const double d2 =
            std::max(0.0, xx + model.sv_squared_norms[k] - 2.0 * dot(x, model.support_vectors[k]));
        sum += model.coefficients[k] * std::exp(-model.gamma * d2);
      }
      return sum;
    }
  }
  return model.bias;
}

int predict_binary(const BinaryModel& model, const SparseVector& x) {
  return sign_of(decision(model, x));
}

MulticlassModel train_multiclass(std::span<const SparseVector> X, std::span<const int> y,
                                 const TrainConfig& cfg, unsigned threads) {
  if (X.size() != y.size()) throw InvalidArgument("X and y differ in length");
  if (X.empty()) throw InvalidArgument("empty training set");
  std::map<int, std::size_t> counts;
  for (int label : y) ++counts[label];

  MulticlassModel model;
  std::vector<std::pair<int, std::size_t>> ordered(counts.begin(), counts.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [label, count] : ordered) {
    model.classes.push_back(label);
    model.frequencies.push_back(count);
  }

  const std::size_t dim = common_dim(X);
  model.models.resize(model.classes.size());
  if (model.classes.size() == 1) {
    model.models[0] = BinaryModel::constant(dim, 1);
    return model;
  }
  parallel_for(model.classes.size(), threads, [&](std::size_t c) {
    std::vector<int> binary(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) binary[i] = y[i] == model.classes[c] ? 1 : -1;
    model.models[c] = train_binary(X, binary, cfg);
  });
  return model;
}

std::vector<double> multiclass_margins(const MulticlassModel& model, const SparseVector& x) {
  std::vector<double> margins;
  margins.reserve(model.models.size());
  for (const auto& m : model.models) margins.push_back(decision(m, x));
  return margins;
}

int predict_multiclass(const MulticlassModel& model, const SparseVector& x) {
  const auto margins = multiclass_margins(model, x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < margins.size(); ++c) {
    if (margins[c] > margins[best]) best = c;
  }
  return model.classes.at(best);
}

}  // namespace survcode::svm
