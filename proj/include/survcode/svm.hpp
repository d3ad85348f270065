#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "survcode/sparse.hpp"

namespace survcode::svm {

enum class Kernel { linear, rbf };

const char* to_string(Kernel kernel);
Kernel kernel_from_string(const std::string& name);

struct TrainConfig {
  double C = 100.0;
  Kernel kernel = Kernel::linear;
  std::optional<double> gamma;  // rbf only
  double tolerance = 1e-3;
  // Coordinate-descent sweeps for linear; SMO gets max_iterations * n
  // pair updates.
  std::size_t max_iterations = 10000;
  std::uint64_t seed = 1;
  // Kernel row cache budget for SMO.
  std::size_t cache_megabytes = 256;

  void validate() const;
};

enum class ModelKind { linear, rbf, constant };

// A trained binary classifier. Linear models keep dense weights over the
// feature space; rbf models keep support vectors with signed coefficients
// (alpha_i * y_i); constant models come from single-class training data.
struct BinaryModel {
  ModelKind kind = ModelKind::constant;
  std::size_t dim = 0;
  double bias = 0.0;
  bool degenerate = false;

  std::vector<double> weights;

  std::vector<SparseVector> support_vectors;
  std::vector<double> coefficients;
  double gamma = 0.0;
  std::vector<double> sv_squared_norms;  // derived, not serialized

  static BinaryModel constant(std::size_t dim, int label);
  // Recomputes derived fields after deserialization.
  void finalize();
};

struct TrainStats {
  std::size_t iterations = 0;
  bool converged = false;
  double final_violation = 0.0;
  std::vector<double> alphas;          // dual variables at exit, in [0, C]
  std::vector<double> dual_objective;  // per sweep (linear) or per pair update (rbf)
};

// X rows must share one dimension; y holds +1/-1. Single-class input
// yields a degenerate constant classifier voting that class.
BinaryModel train_binary(std::span<const SparseVector> X, std::span<const int> y,
                         const TrainConfig& cfg, TrainStats* stats = nullptr);

// L2-regularized hinge loss via dual coordinate descent. The bias is a
// constant feature of value 1 and is regularized with the weights.
BinaryModel train_linear_dcd(std::span<const SparseVector> X, std::span<const int> y,
                             const TrainConfig& cfg, TrainStats* stats = nullptr);

// C-SVC dual with the equality constraint sum(alpha_i y_i) = 0, solved by
// SMO with second-order working-set selection.
BinaryModel train_rbf_smo(std::span<const SparseVector> X, std::span<const int> y,
                          const TrainConfig& cfg, TrainStats* stats = nullptr);

// Throws InvalidArgument on dimension mismatch.
double decision(const BinaryModel& model, const SparseVector& x);

// Margin 0 counts as positive.
inline int sign_of(double margin) { return margin >= 0.0 ? 1 : -1; }
int predict_binary(const BinaryModel& model, const SparseVector& x);

double rbf_kernel(const SparseVector& a, const SparseVector& b, double gamma);

// One-vs-rest. `classes` is ordered by training frequency (descending, ties
// by class id) and argmax ties resolve to the earlier class.
struct MulticlassModel {
  std::vector<int> classes;
  std::vector<std::size_t> frequencies;
  std::vector<BinaryModel> models;
};

MulticlassModel train_multiclass(std::span<const SparseVector> X, std::span<const int> y,
                                 const TrainConfig& cfg, unsigned threads = 1);
std::vector<double> multiclass_margins(const MulticlassModel& model, const SparseVector& x);
int predict_multiclass(const MulticlassModel& model, const SparseVector& x);

}  // namespace survcode::svm
