#include "swk/metrics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace swk {

namespace {

double entropy(const std::map<int, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [label, c] : counts) h -= (c / n) * std::log(c / n);
  return h;
}

}  // namespace

VMeasure v_measure_scores(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("label vectors differ in length");
  VMeasure out;
  if (truth.empty()) return out;
  const auto n = static_cast<double>(truth.size());
  std::map<int, double> classes, clusters;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    classes[truth[i]] += 1.0;
    clusters[predicted[i]] += 1.0;
    joint[{truth[i], predicted[i]}] += 1.0;
  }
  const double h_c = entropy(classes, n);
  const double h_k = entropy(clusters, n);
  double h_c_given_k = 0.0;
  double h_k_given_c = 0.0;
  for (const auto& [key, c] : joint) {
    h_c_given_k -= (c / n) * std::log(c / clusters[key.second]);
    h_k_given_c -= (c / n) * std::log(c / classes[key.first]);
  }
  out.homogeneity = h_c > 0.0 ? 1.0 - h_c_given_k / h_c : 1.0;
  out.completeness = h_k > 0.0 ? 1.0 - h_k_given_c / h_k : 1.0;
  const double s = out.homogeneity + out.completeness;
  out.v = s > 0.0 ? 2.0 * out.homogeneity * out.completeness / s : 0.0;
  return out;
}

double v_measure(std::span<const int> truth, std::span<const int> predicted) {
  return v_measure_scores(truth, predicted).v;
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("label vectors differ in length");
  if (truth.empty()) throw std::invalid_argument("no labels");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace swk
