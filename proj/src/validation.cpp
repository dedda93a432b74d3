#include "swk/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "swk/metrics.hpp"
#include "swk/parallel.hpp"

namespace swk {

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& k, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          k(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

std::vector<int> pick(std::span<const int> labels, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(labels[i]);
  return out;
}

// Correct predictions of a model trained on `train` and scored on `test`.
std::size_t score(const GramMatrix& g, std::span<const int> labels, const std::vector<std::size_t>& train,
                  const std::vector<std::size_t>& test, double C, double tol) {
  const std::vector<int> y = pick(labels, train);
  const std::set<int> distinct(y.begin(), y.end());
  std::vector<int> predicted;
  if (distinct.size() < 2) {
    predicted.assign(test.size(), y.front());
  } else {
    const SvmModel model = svm_train(submatrix(g.entries, train, train), g.spec, y, C, tol);
    predicted = svm_predict(model, submatrix(g.entries, test, train));
  }
  std::size_t hits = 0;
  for (std::size_t t = 0; t < test.size(); ++t) hits += predicted[t] == labels[test[t]];
  return hits;
}

std::size_t smallest_class(std::span<const int> labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::size_t m = labels.size();
  for (const auto& [l, c] : counts) m = std::min(m, c);
  return m;
}

struct Choice {
  std::size_t candidate = 0;
  double C = 0.0;
};

Choice grid_search(const KernelGroup& group, std::span<const int> labels, const std::vector<std::size_t>& train,
                   const CvOptions& options, std::uint64_t seed) {
  Choice best{0, options.c_grid.front()};
  const std::size_t nc = group.candidates.size();
  if (nc * options.c_grid.size() == 1) return best;
  const std::vector<int> y = pick(labels, train);
  const std::size_t inner = std::min(options.inner_folds, smallest_class(y));
  if (inner < 2) return best;
  const std::vector<std::size_t> fold_of = stratified_folds(y, inner, seed);
  double best_hits = -1.0;
  for (std::size_t c = 0; c < nc; ++c) {
    for (double C : options.c_grid) {
      std::size_t hits = 0;
      for (std::size_t f = 0; f < inner; ++f) {
        std::vector<std::size_t> tr, te;
        for (std::size_t i = 0; i < train.size(); ++i) (fold_of[i] == f ? te : tr).push_back(train[i]);
        hits += score(group.candidates[c], labels, tr, te, C, options.tolerance);
      }
      if (static_cast<double>(hits) > best_hits) {
        best_hits = static_cast<double>(hits);
        best = {c, C};
      }
    }
  }
  return best;
}

}  // namespace

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("need at least two folds");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out(labels.size());
  std::size_t next = 0;
  for (auto& [label, idx] : members) {
    if (idx.size() < folds) {
      throw std::invalid_argument("class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                                  " members, fewer than " + std::to_string(folds) + " folds");
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i : idx) out[i] = next++ % folds;
  }
  return out;
}

double median_off_diagonal(const Eigen::MatrixXd& m) {
  std::vector<double> v;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (m(i, j) > 0.0) v.push_back(m(i, j));
    }
  }
  if (v.empty()) return 1.0;
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  const double upper = v[h];
  if (v.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h)));
}

std::vector<CvResult> cross_validate(std::span<const KernelGroup> groups, std::span<const int> labels,
                                     const CvOptions& options) {
  if (options.folds < 2) throw std::invalid_argument("need at least two folds");
  if (options.repeats < 1) throw std::invalid_argument("need at least one repeat");
  if (options.c_grid.empty()) throw std::invalid_argument("empty C grid");
  for (const auto& g : groups) {
    if (g.candidates.empty()) throw std::invalid_argument("kernel group '" + g.name + "' has no candidates");
    for (const auto& c : g.candidates) {
      if (c.size() != labels.size()) throw std::invalid_argument("gram size does not match the label count");
    }
  }
  const std::size_t n = labels.size();

  std::mt19937_64 master(options.seed);
  std::vector<std::uint64_t> repeat_seeds(options.repeats);
  for (auto& s : repeat_seeds) s = master();
  std::vector<std::vector<std::size_t>> assignments(options.repeats);
  for (std::size_t r = 0; r < options.repeats; ++r) {
    assignments[r] = stratified_folds(labels, options.folds, repeat_seeds[r]);
  }

  // One task per (group, repeat, fold).
  const std::size_t per_group = options.repeats * options.folds;
  std::vector<FoldRecord> records(groups.size() * per_group);
  std::vector<std::size_t> hits(records.size(), 0);
  std::vector<std::size_t> sizes(records.size(), 0);
  parallel_for(records.size(), [&](std::size_t task) {
    const std::size_t gi = task / per_group;
    const std::size_t r = (task % per_group) / options.folds;
    const std::size_t f = task % options.folds;
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (assignments[r][i] == f ? test : train).push_back(i);
    const Choice choice = grid_search(groups[gi], labels, train, options, repeat_seeds[r] + f + 1);
    const GramMatrix& g = groups[gi].candidates[choice.candidate];
    hits[task] = score(g, labels, train, test, choice.C, options.tolerance);
    sizes[task] = test.size();
    records[task] = FoldRecord{r, f, static_cast<double>(hits[task]) / static_cast<double>(test.size()), g.spec,
                               choice.C};
  });

  std::vector<CvResult> out;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    CvResult res;
    res.name = groups[gi].name;
    for (std::size_t r = 0; r < options.repeats; ++r) {
      std::size_t h = 0, s = 0;
      for (std::size_t f = 0; f < options.folds; ++f) {
        const std::size_t task = gi * per_group + r * options.folds + f;
        res.folds.push_back(records[task]);
        h += hits[task];
        s += sizes[task];
      }
      res.repeat_accuracy.push_back(static_cast<double>(h) / static_cast<double>(s));
    }
    double sum = 0.0;
    for (double a : res.repeat_accuracy) sum += a;
    res.mean = sum / static_cast<double>(options.repeats);
    double ss = 0.0;
    for (double a : res.repeat_accuracy) ss += (a - res.mean) * (a - res.mean);
    res.stddev = options.repeats > 1 ? std::sqrt(ss / static_cast<double>(options.repeats - 1)) : 0.0;
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace swk
