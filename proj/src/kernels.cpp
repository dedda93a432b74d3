#include "swk/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "swk/parallel.hpp"

namespace swk {

namespace {

constexpr std::array<std::pair<KernelKind, std::string_view>, 6> kNames{{
    {KernelKind::sw_gaussian, "sw_gaussian"},
    {KernelKind::sw_poly, "sw_poly"},
    {KernelKind::linear_phi, "linear_phi"},
    {KernelKind::euclid_rbf, "euclid_rbf"},
    {KernelKind::euclid_linear, "euclid_linear"},
    {KernelKind::euclid_poly, "euclid_poly"},
}};

double poly(double inner, int degree, int offset) { return std::pow(inner + offset, degree); }

// Fills the upper triangle (diagonal included) in parallel, one row per task.
template <class Entry>
Eigen::MatrixXd symmetric_matrix(std::size_t n, Entry&& entry) {
  Eigen::MatrixXd m(n, n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) m(i, j) = entry(i, j);
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
  }
  return m;
}

}  // namespace

std::string_view to_string(KernelKind kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown kernel kind '" + std::string(name) + "'");
}

bool is_gaussian(KernelKind kind) noexcept { return kind == KernelKind::sw_gaussian || kind == KernelKind::euclid_rbf; }

bool is_polynomial(KernelKind kind) noexcept { return kind == KernelKind::sw_poly || kind == KernelKind::euclid_poly; }

void KernelSpec::validate() const {
  if (is_gaussian(kind) && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw std::invalid_argument("gamma must be positive");
  }
  if (is_polynomial(kind)) {
    if (degree < 1) throw std::invalid_argument("degree must be a positive integer");
    if (offset != 0 && offset != 1) throw std::invalid_argument("offset must be 0 or 1");
  }
}

GramMatrix make_gram(const KernelSpec& spec, Eigen::MatrixXd entries) {
  if (entries.rows() != entries.cols()) throw std::invalid_argument("gram matrix must be square");
  if (entries.rows() == 0) throw std::invalid_argument("gram matrix is empty");
  const Eigen::MatrixXd sym = 0.5 * (entries + entries.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return GramMatrix{spec, sym, solver.eigenvalues()(0)};
}

double sw_gaussian(const DiscreteDensity2D& a, const DiscreteDensity2D& b, double gamma, const AngleSet& angles,
                   std::size_t t_count) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double d = sw_distance(a, b, angles, t_count);
  return std::exp(-gamma * d * d);
}

double sw_polynomial(const DiscreteDensity2D& a, const DiscreteDensity2D& b, const Template& tpl, int degree,
                     int offset) {
  KernelSpec{KernelKind::sw_poly, 1.0, degree, offset}.validate();
  return poly(inner(phi_embed(a, tpl), phi_embed(b, tpl)), degree, offset);
}

DatasetFeatures::DatasetFeatures(std::span<const DiscreteDensity2D> dataset, const Template& tpl) {
  const std::size_t n = dataset.size();
  if (n == 0) throw std::invalid_argument("dataset is empty");
  std::vector<std::optional<SlicedRepresentation>> sliced(n);
  std::vector<std::optional<FeatureVector>> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!dataset[i].same_grid(tpl.density())) {
      throw std::invalid_argument("density " + std::to_string(i) + " is not on the template grid");
    }
  }
  parallel_for(n, [&](std::size_t i) {
    try {
      sliced[i].emplace(tpl.slice(dataset[i]));
      phi[i].emplace(phi_embed(*sliced[i], tpl));
    } catch (const std::domain_error& e) {
      throw std::domain_error(std::string(e.what()) + " for density " + std::to_string(i));
    }
  });
  sliced_.reserve(n);
  embeddings_.reserve(n);
  raw_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sliced_.push_back(std::move(*sliced[i]));
    embeddings_.push_back(std::move(*phi[i]));
    const auto v = dataset[i].values();
    raw_.emplace_back(v.begin(), v.end());
  }
  sw2_ = symmetric_matrix(n, [&](std::size_t i, std::size_t j) {
    return i == j ? 0.0 : swk::sw_squared(sliced_[i], sliced_[j]);
  });
  phi_inner_ = symmetric_matrix(n, [&](std::size_t i, std::size_t j) { return inner(embeddings_[i], embeddings_[j]); });
  raw_inner_ = symmetric_matrix(n, [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < raw_[i].size(); ++k) acc += raw_[i][k] * raw_[j][k];
    return acc;
  });
}

Eigen::MatrixXd DatasetFeatures::raw_squared() const {
  return symmetric_matrix(size(), [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < raw_[i].size(); ++k) {
      const double d = raw_[i][k] - raw_[j][k];
      acc += d * d;
    }
    return acc;
  });
}

GramMatrix gram(const DatasetFeatures& features, const KernelSpec& spec) {
  spec.validate();
  const std::size_t n = features.size();
  Eigen::MatrixXd k(n, n);
  switch (spec.kind) {
    case KernelKind::sw_gaussian:
      k = (-spec.gamma * features.sw_squared().array()).exp().matrix();
      break;
    case KernelKind::sw_poly:
      k = features.phi_inner().unaryExpr([&](double v) { return poly(v, spec.degree, spec.offset); });
      break;
    case KernelKind::linear_phi:
      k = features.phi_inner();
      break;
    case KernelKind::euclid_rbf:
      k = (-spec.gamma * features.raw_squared().array()).exp().matrix();
      break;
    case KernelKind::euclid_linear:
      k = features.raw_inner();
      break;
    case KernelKind::euclid_poly:
      k = features.raw_inner().unaryExpr([&](double v) { return poly(v, spec.degree, spec.offset); });
      break;
  }
  return make_gram(spec, std::move(k));
}

GramMatrix gram(std::span<const DiscreteDensity2D> dataset, const KernelSpec& spec, const Template& tpl) {
  spec.validate();
  return gram(DatasetFeatures(dataset, tpl), spec);
}

PdCertificate certify_pd(const Eigen::MatrixXd& g, double tolerance) {
  if (g.rows() != g.cols() || g.rows() == 0) throw std::invalid_argument("certify_pd needs a nonempty square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (g + g.transpose()));
  const auto& ev = solver.eigenvalues();
  PdCertificate out;
  out.min_eigenvalue = ev(0);
  out.max_abs_eigenvalue = std::max(std::fabs(ev(0)), std::fabs(ev(ev.size() - 1)));
  out.witness = solver.eigenvectors().col(0);
  out.pass = out.min_eigenvalue >= -tolerance * out.max_abs_eigenvalue;
  return out;
}

PdCertificate certify_pd(const GramMatrix& g, double tolerance) { return certify_pd(g.entries, tolerance); }

CndCertificate certify_cnd(const Eigen::MatrixXd& squared_distances, std::size_t trials, double tolerance,
                           std::uint64_t seed) {
  const Eigen::Index n = squared_distances.rows();
  if (n != squared_distances.cols()) throw std::invalid_argument("certify_cnd needs a square matrix");
  CndCertificate out;
  out.trials = trials;
  out.max_form = -std::numeric_limits<double>::infinity();
  if (n < 2) {
    out.max_form = 0.0;
    out.witness = Eigen::VectorXd::Zero(n);
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd c(n);
  for (std::size_t t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) c(i) = normal(rng);
    c.array() -= c.mean();
    const double len = c.norm();
    if (!(len > 0.0)) continue;
    c /= len;
    const double form = c.dot(squared_distances * c);
    if (form > tolerance) ++out.violations;
    if (form > out.max_form) {
      out.max_form = form;
      out.witness = c;
    }
  }
  out.pass = out.violations == 0;
  return out;
}

}  // namespace swk
