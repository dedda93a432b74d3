#include "swk/kpca.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace swk {

std::size_t KpcaModel::components() const noexcept {
  std::size_t m = 0;
  while (m < static_cast<std::size_t>(eigenvalues.size()) && eigenvalues(static_cast<Eigen::Index>(m)) > 0.0) ++m;
  return m;
}

double KpcaModel::cpv(std::size_t m) const {
  const auto n = static_cast<std::size_t>(eigenvalues.size());
  if (m > n) throw std::invalid_argument("cpv index exceeds the spectrum size");
  if (m == n) return 100.0;
  const double total = eigenvalues.sum();
  return 100.0 * eigenvalues.head(static_cast<Eigen::Index>(m)).sum() / total;
}

std::vector<double> KpcaModel::cpv_curve() const {
  std::vector<double> out;
  for (std::size_t m = 0; m <= static_cast<std::size_t>(eigenvalues.size()); ++m) out.push_back(cpv(m));
  return out;
}

KpcaModel kpca_fit(const GramMatrix& g) {
  const Eigen::Index n = g.entries.rows();
  if (n < 2) throw std::invalid_argument("kernel PCA needs at least two points");
  KpcaModel model;
  model.spec = g.spec;
  model.row_means = g.entries.rowwise().mean();
  model.grand_mean = model.row_means.mean();
  Eigen::MatrixXd centered = g.entries;
  centered.colwise() -= model.row_means;
  centered.rowwise() -= model.row_means.transpose();
  centered.array() += model.grand_mean;
  centered = 0.5 * (centered + centered.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(centered);
  if (solver.info() != Eigen::Success) throw std::domain_error("eigendecomposition failed");
  const Eigen::VectorXd ascending = solver.eigenvalues();
  const double top = ascending(n - 1);
  const double scale = std::max(1.0, g.entries.cwiseAbs().maxCoeff());
  if (!(top > 1e-13 * scale)) throw std::domain_error("no variance");

  model.eigenvalues.resize(n);
  model.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double lambda = ascending(n - 1 - k);
    if (lambda < kKpcaClamp * top) {
      lambda = 0.0;
      ++model.clamped;
    }
    model.eigenvalues(k) = lambda;
    model.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return model;
}

Eigen::MatrixXd kpca_project(const KpcaModel& model, const Eigen::MatrixXd& kernel_rows, std::size_t m) {
  if (m > model.components()) {
    throw std::invalid_argument("requested " + std::to_string(m) + " components but only " +
                                std::to_string(model.components()) + " are available");
  }
  const auto n = static_cast<Eigen::Index>(model.training_size());
  if (kernel_rows.cols() != n) throw std::invalid_argument("kernel rows must have one column per training point");
  Eigen::MatrixXd centered = kernel_rows;
  const Eigen::VectorXd own_means = kernel_rows.rowwise().mean();
  centered.colwise() -= own_means;
  centered.rowwise() -= model.row_means.transpose();
  centered.array() += model.grand_mean;
  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd alpha = model.eigenvectors.leftCols(mm);
  for (Eigen::Index k = 0; k < mm; ++k) alpha.col(k) /= std::sqrt(model.eigenvalues(k));
  return centered * alpha;
}

Eigen::MatrixXd kpca_training_coordinates(const KpcaModel& model, std::size_t m) {
  if (m > model.components()) throw std::invalid_argument("requested more components than available");
  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd out = model.eigenvectors.leftCols(mm);
  for (Eigen::Index k = 0; k < mm; ++k) out.col(k) *= std::sqrt(model.eigenvalues(k));
  return out;
}

}  // namespace swk
