#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace swk {

struct ClusterAssignment {
  std::vector<int> labels;
  /// Within-cluster sum of squared feature-space distances to the centroids.
  double inertia = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Inertia after the initial assignment and after every Lloyd iteration.
  std::vector<double> inertia_trace;
  /// Restart that produced this assignment.
  std::size_t restart = 0;
};

inline constexpr std::size_t kDefaultRestarts = 10;

/// Lloyd iterations in the feature space of the Gram matrix `k`, seeded by
/// k-means++ on kernel distances. The best of `restarts` runs by inertia is
/// returned (earliest restart on ties). Empty clusters take the point
/// farthest from its own centroid. Throws std::invalid_argument unless
/// 1 <= clusters <= n.
ClusterAssignment kernel_kmeans(const Eigen::MatrixXd& k, std::size_t clusters, std::size_t restarts = kDefaultRestarts,
                                std::uint64_t seed = 0, std::size_t max_iterations = 300);

/// Inertia of a fixed labeling.
double kernel_inertia(const Eigen::MatrixXd& k, const std::vector<int>& labels, std::size_t clusters);

}  // namespace swk
