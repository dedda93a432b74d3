#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swk/density.hpp"
#include "swk/radon.hpp"
#include "swk/sliced.hpp"

namespace swk {

enum class KernelKind { sw_gaussian, sw_poly, linear_phi, euclid_rbf, euclid_linear, euclid_poly };

std::string_view to_string(KernelKind kind) noexcept;
/// Throws std::invalid_argument for unknown names.
KernelKind parse_kernel_kind(std::string_view name);
bool is_gaussian(KernelKind kind) noexcept;
bool is_polynomial(KernelKind kind) noexcept;

struct KernelSpec {
  KernelKind kind = KernelKind::sw_gaussian;
  double gamma = 1.0;
  int degree = 1;
  int offset = 0;

  /// gamma > 0 for Gaussian kinds, degree >= 1 and offset in {0, 1} for
  /// polynomial kinds. Throws std::invalid_argument.
  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

struct GramMatrix {
  KernelSpec spec;
  Eigen::MatrixXd entries;
  double min_eigenvalue = 0.0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

/// Wraps a symmetric matrix, symmetrizing rounding noise and storing the
/// smallest eigenvalue.
GramMatrix make_gram(const KernelSpec& spec, Eigen::MatrixXd entries);

double sw_gaussian(const DiscreteDensity2D& a, const DiscreteDensity2D& b, double gamma,
                   const AngleSet& angles = AngleSet(), std::size_t t_count = 0);
double sw_polynomial(const DiscreteDensity2D& a, const DiscreteDensity2D& b, const Template& tpl, int degree,
                     int offset);

/// Per-item data shared by every kernel over one dataset: sinograms on the
/// template grid, explicit embeddings and raw density vectors.
class DatasetFeatures {
 public:
  DatasetFeatures(std::span<const DiscreteDensity2D> dataset, const Template& tpl);

  std::size_t size() const noexcept { return sliced_.size(); }
  const SlicedRepresentation& sliced(std::size_t i) const noexcept { return sliced_[i]; }
  const FeatureVector& embedding(std::size_t i) const noexcept { return embeddings_[i]; }
  std::span<const double> raw(std::size_t i) const noexcept { return raw_[i]; }

  /// Pairwise SW^2 from the sinograms.
  const Eigen::MatrixXd& sw_squared() const noexcept { return sw2_; }
  /// Inner products of the explicit embeddings.
  const Eigen::MatrixXd& phi_inner() const noexcept { return phi_inner_; }
  /// Inner products of the raw density vectors.
  const Eigen::MatrixXd& raw_inner() const noexcept { return raw_inner_; }
  Eigen::MatrixXd raw_squared() const;

 private:
  std::vector<SlicedRepresentation> sliced_;
  std::vector<FeatureVector> embeddings_;
  std::vector<std::vector<double>> raw_;
  Eigen::MatrixXd sw2_;
  Eigen::MatrixXd phi_inner_;
  Eigen::MatrixXd raw_inner_;
};

GramMatrix gram(const DatasetFeatures& features, const KernelSpec& spec);
GramMatrix gram(std::span<const DiscreteDensity2D> dataset, const KernelSpec& spec, const Template& tpl);

struct PdCertificate {
  bool pass = true;
  double min_eigenvalue = 0.0;
  double max_abs_eigenvalue = 0.0;
  /// Unit eigenvector of the smallest eigenvalue.
  Eigen::VectorXd witness;
};

/// Passes iff min eigenvalue >= -tolerance * max |eigenvalue|.
PdCertificate certify_pd(const Eigen::MatrixXd& g, double tolerance = 1e-8);
PdCertificate certify_pd(const GramMatrix& g, double tolerance = 1e-8);

struct CndCertificate {
  bool pass = true;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_form = 0.0;
  /// Zero-sum unit coefficient vector attaining max_form.
  Eigen::VectorXd witness;
};

inline constexpr std::uint64_t kDefaultCndSeed = 1234567;

/// Draws `trials` Gaussian coefficient vectors projected to zero sum and
/// scaled to unit norm; passes iff every c^T D c <= tolerance.
CndCertificate certify_cnd(const Eigen::MatrixXd& squared_distances, std::size_t trials = 1000,
                           double tolerance = 1e-8, std::uint64_t seed = kDefaultCndSeed);

}  // namespace swk
