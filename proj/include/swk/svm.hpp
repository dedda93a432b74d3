#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swk/kernels.hpp"
#include "swk/sliced.hpp"

namespace swk {

inline constexpr double kDefaultSvmTolerance = 1e-4;

/// Soft-margin binary machine for classes (positive, negative) of a
/// one-vs-one decomposition. f(x) = sum_i coef_i K(x, x_i) + bias with
/// coef_i = alpha_i y_i, alpha_i in [0, C].
struct BinarySvm {
  int positive = 0;
  int negative = 1;
  /// Training-set indices used by this machine.
  std::vector<std::size_t> indices;
  std::vector<double> alpha;
  std::vector<double> coef;
  double bias = 0.0;
  std::size_t iterations = 0;
  /// Maximal KKT violation at exit.
  double kkt_violation = 0.0;
  /// Dual objective after every SMO step.
  std::vector<double> objective_trace;

  /// Decision value from one row of kernel values against the full training set.
  double decision(std::span<const double> kernel_row) const;
  std::vector<std::size_t> support() const;
};

struct SvmModel {
  KernelSpec spec;
  double C = 1.0;
  double tolerance = kDefaultSvmTolerance;
  std::size_t training_size = 0;
  /// Sorted distinct labels.
  std::vector<int> classes;
  /// One machine per class pair (a < b), in lexicographic pair order.
  std::vector<BinarySvm> machines;
};

/// SMO with maximal-violating-pair selection on every class pair. Throws
/// std::invalid_argument for fewer than two classes.
SvmModel svm_train(const GramMatrix& g, std::span<const int> labels, double C, double tolerance = kDefaultSvmTolerance,
                   std::size_t max_iterations = 100000);
SvmModel svm_train(const Eigen::MatrixXd& k, const KernelSpec& spec, std::span<const int> labels, double C,
                   double tolerance = kDefaultSvmTolerance, std::size_t max_iterations = 100000);

/// Majority vote over the machines, ties broken by the summed decision values
/// in favour of each class, then by the smaller label. `kernel_rows` holds one
/// row per query point against the full training set.
std::vector<int> svm_predict(const SvmModel& model, const Eigen::MatrixXd& kernel_rows);

/// Decision values of a binary model, one per kernel row.
std::vector<double> svm_decision_values(const SvmModel& model, const Eigen::MatrixXd& kernel_rows);

struct AxisSample {
  double s = 0.0;
  std::optional<DiscreteDensity2D> density;
  /// Inversion failure message when `density` is empty.
  std::string error;
};

/// Samples the normal of a binary linear_phi machine in embedding space:
/// phi_invert(mean + s * w/|w|) for `steps` values of s evenly spread over
/// [-S, S], S the largest |projection| of a training embedding on w/|w|
/// (steps = 1 gives s = 0 only). Throws std::invalid_argument("explicit axis
/// requires linear kernel") for other kinds.
std::vector<AxisSample> svm_decision_axis(const SvmModel& model, std::span<const FeatureVector> training_embeddings,
                                          const Template& tpl, std::size_t steps);

/// w = sum_i coef_i phi(I_i) for the first machine of a linear_phi model.
FeatureVector svm_normal(const SvmModel& model, std::span<const FeatureVector> training_embeddings);

}  // namespace swk
