#include "swk/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

#include "swk/parallel.hpp"

namespace swk {

namespace {

// Squared distances from every point to every cluster centroid:
//   K_pp - 2/|c| sum_{q in c} K_pq + 1/|c|^2 sum_{q,r in c} K_qr.
Eigen::MatrixXd centroid_distances(const Eigen::MatrixXd& k, const std::vector<int>& labels, std::size_t clusters) {
  const Eigen::Index n = k.rows();
  const auto kc = static_cast<Eigen::Index>(clusters);
  Eigen::MatrixXd member = Eigen::MatrixXd::Zero(n, kc);
  for (Eigen::Index p = 0; p < n; ++p) member(p, labels[static_cast<std::size_t>(p)]) = 1.0;
  const Eigen::VectorXd sizes = member.colwise().sum().transpose();
  const Eigen::MatrixXd cross = k * member;  // n x clusters
  Eigen::MatrixXd d(n, kc);
  for (Eigen::Index c = 0; c < kc; ++c) {
    if (sizes(c) == 0.0) {
      d.col(c).setConstant(std::numeric_limits<double>::infinity());
      continue;
    }
    const double within = member.col(c).dot(cross.col(c)) / (sizes(c) * sizes(c));
    for (Eigen::Index p = 0; p < n; ++p) d(p, c) = k(p, p) - 2.0 * cross(p, c) / sizes(c) + within;
  }
  return d;
}

double inertia_of(const Eigen::MatrixXd& d, const std::vector<int>& labels) {
  double acc = 0.0;
  for (std::size_t p = 0; p < labels.size(); ++p) acc += std::max(0.0, d(static_cast<Eigen::Index>(p), labels[p]));
  return acc;
}

// Moves the point farthest from its centroid into each empty cluster.
void repair_empty(const Eigen::MatrixXd& k, std::vector<int>& labels, std::size_t clusters) {
  while (true) {
    std::vector<std::size_t> sizes(clusters, 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    const auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
    if (empty == sizes.end()) return;
    const Eigen::MatrixXd d = centroid_distances(k, labels, clusters);
    std::size_t far = labels.size();
    double best = -1.0;
    for (std::size_t p = 0; p < labels.size(); ++p) {
      if (sizes[static_cast<std::size_t>(labels[p])] < 2) continue;
      const double v = d(static_cast<Eigen::Index>(p), labels[p]);
      if (v > best) {
        best = v;
        far = p;
      }
    }
    labels[far] = static_cast<int>(empty - sizes.begin());
  }
}

std::vector<int> plus_plus_init(const Eigen::MatrixXd& k, std::size_t clusters, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(k.rows());
  std::vector<std::size_t> seeds{std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  auto dist = [&](std::size_t p, std::size_t q) {
    const auto a = static_cast<Eigen::Index>(p);
    const auto b = static_cast<Eigen::Index>(q);
    return std::max(0.0, k(a, a) + k(b, b) - 2.0 * k(a, b));
  };
  while (seeds.size() < clusters) {
    double total = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      nearest[p] = std::min(nearest[p], dist(p, seeds.back()));
      total += nearest[p];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      pick = n - 1;
      for (std::size_t p = 0; p < n; ++p) {
        if (u < nearest[p]) {
          pick = p;
          break;
        }
        u -= nearest[p];
      }
    } else {
      // All remaining points coincide with a seed; take the first unused index.
      while (std::find(seeds.begin(), seeds.end(), pick) != seeds.end()) ++pick;
    }
    seeds.push_back(pick);
  }
  std::vector<int> labels(n);
  for (std::size_t p = 0; p < n; ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters; ++c) {
      const double v = p == seeds[c] ? -1.0 : dist(p, seeds[c]);
      if (v < best) {
        best = v;
        labels[p] = static_cast<int>(c);
      }
    }
  }
  return labels;
}

ClusterAssignment lloyd(const Eigen::MatrixXd& k, std::size_t clusters, std::uint64_t seed, std::size_t max_iterations) {
  std::mt19937_64 rng(seed);
  ClusterAssignment out;
  out.labels = plus_plus_init(k, clusters, rng);
  repair_empty(k, out.labels, clusters);
  Eigen::MatrixXd d = centroid_distances(k, out.labels, clusters);
  out.inertia_trace.push_back(inertia_of(d, out.labels));
  while (out.iterations < max_iterations) {
    std::vector<int> next = out.labels;
    for (std::size_t p = 0; p < next.size(); ++p) {
      const auto row = static_cast<Eigen::Index>(p);
      int best = out.labels[p];
      for (std::size_t c = 0; c < clusters; ++c) {
        if (d(row, static_cast<Eigen::Index>(c)) < d(row, best)) best = static_cast<int>(c);
      }
      next[p] = best;
    }
    repair_empty(k, next, clusters);
    ++out.iterations;
    const bool changed = next != out.labels;
    out.labels = std::move(next);
    d = centroid_distances(k, out.labels, clusters);
    out.inertia_trace.push_back(inertia_of(d, out.labels));
    if (!changed) {
      out.converged = true;
      break;
    }
  }
  out.inertia = out.inertia_trace.back();
  return out;
}

}  // namespace

ClusterAssignment kernel_kmeans(const Eigen::MatrixXd& k, std::size_t clusters, std::size_t restarts,
                                std::uint64_t seed, std::size_t max_iterations) {
  const auto n = static_cast<std::size_t>(k.rows());
  if (k.rows() != k.cols()) throw std::invalid_argument("gram matrix must be square");
  if (clusters < 1) throw std::invalid_argument("need at least one cluster");
  if (clusters > n) throw std::invalid_argument("more clusters than points");
  restarts = std::max<std::size_t>(restarts, 1);

  std::mt19937_64 master(seed);
  std::vector<std::uint64_t> seeds(restarts);
  for (auto& s : seeds) s = master();
  std::vector<ClusterAssignment> runs(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    runs[r] = lloyd(k, clusters, seeds[r], max_iterations);
    runs[r].restart = r;
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  return runs[best];
}

double kernel_inertia(const Eigen::MatrixXd& k, const std::vector<int>& labels, std::size_t clusters) {
  if (labels.size() != static_cast<std::size_t>(k.rows())) throw std::invalid_argument("one label per point required");
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= clusters) throw std::invalid_argument("label out of range");
  }
  return inertia_of(centroid_distances(k, labels, clusters), labels);
}

}  // namespace swk
