#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ovoscope {

struct LabeledSample {
  std::vector<double> x;
  int y = 1;  // +1 or -1
};

struct TrainConfig {
  double c = 1.0;            // box constraint / penalty
  double kkt_tol = 1e-3;     // convergence tolerance on the KKT residual
  double eps = 1e-8;         // relative floor: steps below eps*(a_new + a_old + eps) are rejected
  std::size_t max_passes = 200;
  std::uint64_t seed = 0;    // order in which second indices are tried
  bool standardize = false;  // z-score features before training

  void validate() const;
};

// Per-feature affine map x' = (x - mean) / scale applied before the kernel.
struct FeatureScaling {
  std::vector<double> means;
  std::vector<double> scales;

  std::vector<double> apply(std::span<const double> x) const;
  static FeatureScaling fit(std::span<const LabeledSample> samples);
};

struct SupportVector {
  std::vector<double> x;  // in the model's input space (after scaling)
  int y = 1;
  double alpha = 0.0;
};

// Linear soft-margin SVM.
struct SvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  double c = 1.0;
  std::vector<SupportVector> support_vectors;
  std::optional<FeatureScaling> scaling;

  // Training diagnostics; not persisted.
  std::vector<double> alphas;  // one per training sample, in training order
  bool converged = true;
  std::size_t passes = 0;

  std::size_t dimension() const { return weights.size(); }
};

// sum_j a_j - 1/2 sum_jk a_j a_k y_j y_k <x_j, x_k>
double dual_objective(std::span<const LabeledSample> samples, std::span<const double> alphas);

// Sequential minimal optimization of the dual under 0 <= a_j <= c and
// sum_j a_j y_j = 0. Throws InvalidArgument for fewer than two samples, a single
// class, mismatched dimensions, labels other than +-1 or non-finite features.
// Failing to reach kkt_tol within max_passes is reported through
// SvmModel::converged, with the last iterate returned.
SvmModel train_smo(std::span<const LabeledSample> samples, const TrainConfig& cfg);

// w . x + b
double decision_value(const SvmModel& model, std::span<const double> x);
// sum_j a_j y_j <x, x_j> + b over the support vectors.
double decision_value_sv(const SvmModel& model, std::span<const double> x);
// +1 if the decision value is positive, otherwise -1.
int predict(const SvmModel& model, std::span<const double> x);

// Largest KKT residual over the training samples (needs model.alphas aligned with them):
// a = 0 requires y f >= 1, 0 < a < c requires y f = 1, a = c requires y f <= 1.
double kkt_violation(const SvmModel& model, std::span<const LabeledSample> samples);

// 1/2 |w|^2 + c sum_j max(0, 1 - y_j f(x_j))
double primal_objective(const SvmModel& model, std::span<const LabeledSample> samples);

// JSON model file. model_from_json throws InvalidArgument on malformed input.
std::string model_to_json(const SvmModel& model);
SvmModel model_from_json(const std::string& text);

}  // namespace ovoscope
