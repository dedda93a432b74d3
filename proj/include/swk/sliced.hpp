#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swk/density.hpp"
#include "swk/radon.hpp"

namespace swk {

/// Discretized phi(I) over the (theta, t) grid of a template, row-major L x T.
///
/// The inner product is the angle-averaged Riemann sum
///   <u, v> = (1/L) sum_l sum_t u(l, t) v(l, t) dt,
/// matching the probability-normalized angle measure of sw_distance.
class FeatureVector {
 public:
  FeatureVector(AngleSet angles, Grid1D t_grid, std::vector<double> values);

  const AngleSet& angles() const noexcept { return angles_; }
  const Grid1D& t_grid() const noexcept { return t_grid_; }
  std::size_t rows() const noexcept { return angles_.size(); }
  std::size_t cols() const noexcept { return t_grid_.count; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(std::size_t l) const noexcept { return {values_.data() + l * cols(), cols()}; }
  bool compatible(const FeatureVector& other) const noexcept;

  FeatureVector& operator+=(const FeatureVector& other);
  FeatureVector& operator-=(const FeatureVector& other);
  FeatureVector& operator*=(double s);

 private:
  AngleSet angles_;
  Grid1D t_grid_;
  std::vector<double> values_;
};

FeatureVector operator+(FeatureVector a, const FeatureVector& b);
FeatureVector operator-(FeatureVector a, const FeatureVector& b);
FeatureVector operator*(double s, FeatureVector v);

double inner(const FeatureVector& a, const FeatureVector& b);
double norm(const FeatureVector& v);
double distance(const FeatureVector& a, const FeatureVector& b);

/// Reference density sigma together with its precomputed sinogram.
class Template {
 public:
  Template(DiscreteDensity2D density, const AngleSet& angles, std::size_t t_count = 0);

  const DiscreteDensity2D& density() const noexcept { return density_; }
  const SlicedRepresentation& sliced() const noexcept { return sliced_; }
  const AngleSet& angles() const noexcept { return sliced_.angles(); }
  std::size_t t_count() const noexcept { return sliced_.t_grid().count; }

  /// Sinogram of `image` with this template's angles and t grid.
  SlicedRepresentation slice(const DiscreteDensity2D& image) const;
  FeatureVector zero() const;

 private:
  DiscreteDensity2D density_;
  SlicedRepresentation sliced_;
};

/// Pointwise mean of the dataset, regularized and renormalized.
Template make_template(std::span<const DiscreteDensity2D> dataset, const AngleSet& angles, std::size_t t_count = 0,
                       double epsilon = kDefaultEpsilon);

/// Mean over angles of the squared per-slice W2.
double sw_squared(const SlicedRepresentation& a, const SlicedRepresentation& b);

/// Sliced Wasserstein distance with the uniform probability measure on the L
/// angles. Throws std::invalid_argument on grid mismatch.
double sw_distance(const DiscreteDensity2D& a, const DiscreteDensity2D& b, const AngleSet& angles = AngleSet(),
                   std::size_t t_count = 0);

/// Row l is psi_embed(slice l of I, slice l of the template).
FeatureVector phi_embed(const DiscreteDensity2D& image, const Template& tpl);
FeatureVector phi_embed(const SlicedRepresentation& sliced, const Template& tpl);

/// Per-angle psi_invert followed by filtered back-projection onto the
/// template's pixel grid. A non-monotone map at some angle raises
/// std::domain_error naming that angle.
DiscreteDensity2D phi_invert(const FeatureVector& v, const Template& tpl);

}  // namespace swk
