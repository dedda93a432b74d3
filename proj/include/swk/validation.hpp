#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swk/kernels.hpp"
#include "swk/svm.hpp"

namespace swk {

/// One kernel family in the comparison: its hyper-parameter candidates as
/// precomputed Gram matrices over the whole dataset.
struct KernelGroup {
  std::string name;
  std::vector<GramMatrix> candidates;
};

struct CvOptions {
  std::size_t folds = 5;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::vector<double> c_grid{0.1, 1.0, 10.0, 100.0};
  /// Folds of the inner grid search, capped by the smallest training class.
  std::size_t inner_folds = 3;
  double tolerance = kDefaultSvmTolerance;
};

struct FoldRecord {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  double accuracy = 0.0;
  KernelSpec spec;
  double C = 0.0;
};

struct CvResult {
  std::string name;
  std::vector<FoldRecord> folds;
  /// Accuracy pooled over the folds of each repeat.
  std::vector<double> repeat_accuracy;
  double mean = 0.0;
  /// Sample standard deviation over repeats (0 for a single repeat).
  double stddev = 0.0;
};

/// Stratified fold index per item: classes are shuffled independently and
/// dealt round-robin. Throws std::invalid_argument when a class has fewer
/// members than folds.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

/// Stratified k-fold CV. For every outer training split the (candidate, C)
/// pair is chosen by an inner stratified CV on that split alone; the chosen
/// model is retrained on the split and scored on the held-out fold.
std::vector<CvResult> cross_validate(std::span<const KernelGroup> groups, std::span<const int> labels,
                                     const CvOptions& options);

/// Median of the strictly positive off-diagonal entries.
double median_off_diagonal(const Eigen::MatrixXd& m);

}  // namespace swk
