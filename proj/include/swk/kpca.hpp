#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "swk/kernels.hpp"

namespace swk {

/// Eigenvalues below this fraction of the largest are clamped to zero.
inline constexpr double kKpcaClamp = 1e-10;

struct KpcaModel {
  KernelSpec spec;
  /// Centered-Gram spectrum, descending, clamped at zero.
  Eigen::VectorXd eigenvalues;
  /// Unit eigenvectors matching `eigenvalues`, one per column.
  Eigen::MatrixXd eigenvectors;
  /// Row means and grand mean of the uncentered training Gram.
  Eigen::VectorXd row_means;
  double grand_mean = 0.0;
  /// Eigenvalues set to zero by the clamp (negative or negligible).
  std::size_t clamped = 0;

  std::size_t training_size() const noexcept { return static_cast<std::size_t>(row_means.size()); }
  /// Components with a nonzero eigenvalue.
  std::size_t components() const noexcept;
  /// 100 * (sum of the top m eigenvalues) / (sum of all), m = 0..n.
  double cpv(std::size_t m) const;
  std::vector<double> cpv_curve() const;
};

/// Double-centers and eigendecomposes. Throws std::domain_error("no variance")
/// when the centered Gram vanishes.
KpcaModel kpca_fit(const GramMatrix& g);

/// Coordinates of new points from their kernel rows against the training set
/// (one row per point), on the top m components scaled by 1/sqrt(lambda).
Eigen::MatrixXd kpca_project(const KpcaModel& model, const Eigen::MatrixXd& kernel_rows, std::size_t m);

/// Coordinates of the training points themselves.
Eigen::MatrixXd kpca_training_coordinates(const KpcaModel& model, std::size_t m);

}  // namespace swk
