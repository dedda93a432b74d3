#include "swk/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace swk {

namespace {

constexpr double kTau = 1e-12;

BinarySvm smo(const Eigen::MatrixXd& k, std::vector<std::size_t> indices, const std::vector<double>& y, double C,
              double tol, std::size_t max_iterations) {
  const std::size_t n = indices.size();
  auto K = [&](std::size_t a, std::size_t b) {
    return k(static_cast<Eigen::Index>(indices[a]), static_cast<Eigen::Index>(indices[b]));
  };
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - sum(a)

  auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };
  auto objective = [&] {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += alpha[t] * (1.0 - 0.5 * (grad[t] + 1.0));
    return acc;
  };

  BinarySvm out;
  double gap = 0.0;
  while (true) {
    std::size_t i = n, j = n;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    gap = (i == n || j == n) ? 0.0 : g_max - g_min;
    if (gap <= tol || out.iterations >= max_iterations) break;

    // Two-variable subproblem along y_i d_i = -y_j d_j (LIBSVM update).
    const double quad = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), kTau);
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = old_i - old_j;
      double ai = old_i + delta;
      double aj = old_j + delta;
      if (diff > 0 && aj < 0) {
        aj = 0;
        ai = diff;
      } else if (diff <= 0 && ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0 && ai > C) {
        ai = C;
        aj = C - diff;
      } else if (diff <= 0 && aj > C) {
        aj = C;
        ai = C + diff;
      }
      alpha[i] = ai;
      alpha[j] = aj;
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = old_i + old_j;
      double ai = old_i - delta;
      double aj = old_j + delta;
      if (sum > C && ai > C) {
        ai = C;
        aj = sum - C;
      } else if (sum <= C && aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > C && aj > C) {
        aj = C;
        ai = sum - C;
      } else if (sum <= C && ai < 0) {
        ai = 0;
        aj = sum;
      }
      alpha[i] = ai;
      alpha[j] = aj;
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * K(t, i) * di + y[j] * K(t, j) * dj);
    }
    ++out.iterations;
    out.objective_trace.push_back(objective());
  }

  // Bias from free vectors, else the midpoint of the feasible interval.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] > 0.0 && alpha[t] < C) {
      free_sum += yg;
      ++free_count;
    } else if ((alpha[t] >= C && y[t] < 0) || (alpha[t] <= 0.0 && y[t] > 0)) {
      ub = std::min(ub, yg);
    } else {
      lb = std::max(lb, yg);
    }
  }
  double rho = 0.0;
  if (free_count > 0) {
    rho = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    rho = 0.5 * (ub + lb);
  } else {
    rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  }

  out.indices = std::move(indices);
  out.alpha = alpha;
  out.coef.resize(n);
  for (std::size_t t = 0; t < n; ++t) out.coef[t] = alpha[t] * y[t];
  out.bias = -rho;
  out.kkt_violation = gap;
  return out;
}

void check_inputs(const Eigen::MatrixXd& k, std::span<const int> labels, double C) {
  if (k.rows() != k.cols()) throw std::invalid_argument("gram matrix must be square");
  if (static_cast<std::size_t>(k.rows()) != labels.size()) throw std::invalid_argument("one label per point required");
  if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
}

}  // namespace

double BinarySvm::decision(std::span<const double> kernel_row) const {
  double acc = bias;
  for (std::size_t t = 0; t < indices.size(); ++t) {
    if (coef[t] != 0.0) acc += coef[t] * kernel_row[indices[t]];
  }
  return acc;
}

std::vector<std::size_t> BinarySvm::support() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < indices.size(); ++t) {
    if (alpha[t] > 0.0) out.push_back(indices[t]);
  }
  return out;
}

SvmModel svm_train(const Eigen::MatrixXd& k, const KernelSpec& spec, std::span<const int> labels, double C,
                   double tolerance, std::size_t max_iterations) {
  check_inputs(k, labels, C);
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw std::invalid_argument("svm needs at least two classes");
  SvmModel model;
  model.spec = spec;
  model.C = C;
  model.tolerance = tolerance;
  model.training_size = labels.size();
  model.classes.assign(distinct.begin(), distinct.end());
  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      std::vector<std::size_t> idx;
      std::vector<double> y;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == model.classes[a] || labels[i] == model.classes[b]) {
          idx.push_back(i);
          y.push_back(labels[i] == model.classes[a] ? 1.0 : -1.0);
        }
      }
      BinarySvm m = smo(k, std::move(idx), y, C, tolerance, max_iterations);
      m.positive = model.classes[a];
      m.negative = model.classes[b];
      model.machines.push_back(std::move(m));
    }
  }
  return model;
}

SvmModel svm_train(const GramMatrix& g, std::span<const int> labels, double C, double tolerance,
                   std::size_t max_iterations) {
  return svm_train(g.entries, g.spec, labels, C, tolerance, max_iterations);
}

std::vector<double> svm_decision_values(const SvmModel& model, const Eigen::MatrixXd& kernel_rows) {
  if (model.machines.size() != 1) throw std::invalid_argument("decision values need a binary model");
  if (static_cast<std::size_t>(kernel_rows.cols()) != model.training_size) {
    throw std::invalid_argument("kernel rows must have one column per training point");
  }
  std::vector<double> out;
  std::vector<double> row(model.training_size);
  for (Eigen::Index r = 0; r < kernel_rows.rows(); ++r) {
    Eigen::VectorXd::Map(row.data(), kernel_rows.cols()) = kernel_rows.row(r).transpose();
    out.push_back(model.machines[0].decision(row));
  }
  return out;
}

std::vector<int> svm_predict(const SvmModel& model, const Eigen::MatrixXd& kernel_rows) {
  if (static_cast<std::size_t>(kernel_rows.cols()) != model.training_size) {
    throw std::invalid_argument("kernel rows must have one column per training point");
  }
  const std::size_t nc = model.classes.size();
  auto slot = [&](int label) {
    return static_cast<std::size_t>(std::lower_bound(model.classes.begin(), model.classes.end(), label) -
                                    model.classes.begin());
  };
  std::vector<int> out;
  std::vector<double> row(model.training_size);
  for (Eigen::Index r = 0; r < kernel_rows.rows(); ++r) {
    Eigen::VectorXd::Map(row.data(), kernel_rows.cols()) = kernel_rows.row(r).transpose();
    std::vector<int> votes(nc, 0);
    std::vector<double> strength(nc, 0.0);
    for (const auto& m : model.machines) {
      const double f = m.decision(row);
      const std::size_t pos = slot(m.positive);
      const std::size_t neg = slot(m.negative);
      ++votes[f > 0.0 ? pos : neg];
      strength[pos] += f;
      strength[neg] -= f;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < nc; ++c) {
      if (votes[c] > votes[best] || (votes[c] == votes[best] && strength[c] > strength[best])) best = c;
    }
    out.push_back(model.classes[best]);
  }
  return out;
}

FeatureVector svm_normal(const SvmModel& model, std::span<const FeatureVector> training_embeddings) {
  if (model.spec.kind != KernelKind::linear_phi) throw std::invalid_argument("explicit axis requires linear kernel");
  if (model.machines.size() != 1) throw std::invalid_argument("explicit axis requires a binary model");
  if (training_embeddings.size() != model.training_size) {
    throw std::invalid_argument("one training embedding per training point required");
  }
  const auto& m = model.machines[0];
  FeatureVector w = 0.0 * training_embeddings[0];
  for (std::size_t t = 0; t < m.indices.size(); ++t) {
    if (m.coef[t] != 0.0) w += m.coef[t] * training_embeddings[m.indices[t]];
  }
  return w;
}

std::vector<AxisSample> svm_decision_axis(const SvmModel& model, std::span<const FeatureVector> training_embeddings,
                                          const Template& tpl, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  FeatureVector w = svm_normal(model, training_embeddings);
  const double len = norm(w);
  if (!(len > 0.0)) throw std::domain_error("svm normal vanishes");
  w *= 1.0 / len;

  FeatureVector mean = 0.0 * training_embeddings[0];
  for (const auto& e : training_embeddings) mean += e;
  mean *= 1.0 / static_cast<double>(training_embeddings.size());
  double reach = 0.0;
  for (const auto& e : training_embeddings) reach = std::max(reach, std::fabs(inner(e - mean, w)));

  std::vector<AxisSample> out(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    out[k].s = steps == 1 ? 0.0 : -reach + 2.0 * reach * static_cast<double>(k) / static_cast<double>(steps - 1);
    try {
      out[k].density.emplace(phi_invert(mean + out[k].s * w, tpl));
    } catch (const std::domain_error& e) {
      out[k].error = e.what();
    }
  }
  return out;
}

}  // namespace swk
