#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swk/density.hpp"

namespace swk {

inline constexpr std::size_t kDefaultAngleCount = 180;

/// Equally spaced projection directions theta_l = l * pi / L on [0, pi).
class AngleSet {
 public:
  explicit AngleSet(std::size_t count = kDefaultAngleCount);

  std::size_t size() const noexcept { return angles_.size(); }
  double operator[](std::size_t l) const noexcept { return angles_[l]; }
  std::span<const double> angles() const noexcept { return angles_; }
  bool operator==(const AngleSet& other) const noexcept { return angles_.size() == other.angles_.size(); }

 private:
  std::vector<double> angles_;
};

/// Radon sinogram: one regularized 1D density per angle on a shared t grid,
/// with the per-angle CDFs precomputed for transport.
class SlicedRepresentation {
 public:
  SlicedRepresentation(AngleSet angles, Grid1D t_grid, std::vector<DiscreteDensity1D> slices);

  const AngleSet& angles() const noexcept { return angles_; }
  const Grid1D& t_grid() const noexcept { return t_grid_; }
  std::size_t size() const noexcept { return slices_.size(); }
  std::span<const DiscreteDensity1D> slices() const noexcept { return slices_; }
  const DiscreteDensity1D& slice(std::size_t l) const noexcept { return slices_[l]; }
  const Cdf1D& slice_cdf(std::size_t l) const noexcept { return cdfs_[l]; }

 private:
  AngleSet angles_;
  Grid1D t_grid_;
  std::vector<DiscreteDensity1D> slices_;
  std::vector<Cdf1D> cdfs_;
};

/// max(rows, cols) rounded up to even.
std::size_t default_t_count(std::size_t rows, std::size_t cols);

/// Centered t grid of `t_count` cells spanning the diagonal of the pixel box.
Grid1D default_t_grid(const DiscreteDensity2D& image, std::size_t t_count = 0);

/// Raw line integrals of `image` along direction theta, sampled on `t_grid`.
/// Bilinear interpolation along each ray; no normalization. Any theta is
/// accepted, so this also serves for checks outside [0, pi).
std::vector<double> radon_project(const DiscreteDensity2D& image, double theta, const Grid1D& t_grid);

/// Forward transform. t_count = 0 selects default_t_count. Each slice is
/// epsilon-regularized and renormalized to unit mass.
SlicedRepresentation radon_forward(const DiscreteDensity2D& image, const AngleSet& angles, std::size_t t_count = 0,
                                   double epsilon = kDefaultEpsilon);

/// Forward transform on a caller-supplied t grid. Throws "truncated projection"
/// when the grid does not cover the rotated support of the image.
SlicedRepresentation radon_forward(const DiscreteDensity2D& image, const AngleSet& angles, const Grid1D& t_grid,
                                   double epsilon = kDefaultEpsilon);

/// Filtered back-projection (Ram-Lak, FFT convolution). Negative values are
/// clamped, then the result is regularized and renormalized. The pixel size
/// defaults to the one implied by a diagonal-spanning t grid. Use L >= rows
/// for full resolution; fewer angles still give a valid density.
DiscreteDensity2D radon_inverse(const SlicedRepresentation& sinogram, std::size_t rows, std::size_t cols);
DiscreteDensity2D radon_inverse(const SlicedRepresentation& sinogram, std::size_t rows, std::size_t cols,
                                double pixel_size, double epsilon = kDefaultEpsilon);

}  // namespace swk
