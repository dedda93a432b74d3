#pragma once

#include <span>

namespace swk {

struct VMeasure {
  double homogeneity = 1.0;
  double completeness = 1.0;
  double v = 1.0;
};

/// Entropy-based external clustering score (beta = 1). A labeling with a
/// single class counts as perfectly homogeneous, one with a single cluster as
/// perfectly complete. Throws std::invalid_argument on length mismatch.
VMeasure v_measure_scores(std::span<const int> truth, std::span<const int> predicted);
double v_measure(std::span<const int> truth, std::span<const int> predicted);

double accuracy(std::span<const int> truth, std::span<const int> predicted);

}  // namespace swk
