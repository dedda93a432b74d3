#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swk {

/// Floor added (as a fraction of total mass) before normalizing real data.
inline constexpr double kDefaultEpsilon = 1e-8;

/// Regular sampling of the real line.
///
/// Sample k sits at origin + k*spacing and is the center of cell k, the
/// interval [x_k - spacing/2, x_k + spacing/2). Densities are constant on
/// cells, so every integral over the grid is exact for that model.
struct Grid1D {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t count = 2;

  Grid1D() = default;
  Grid1D(double origin, double spacing, std::size_t count);

  /// Grid of `count` cell centers exactly tiling [lo, hi].
  static Grid1D covering(double lo, double hi, std::size_t count);

  double position(std::size_t k) const noexcept { return origin + static_cast<double>(k) * spacing; }
  /// Left edge of cell k; edge(count) is the right end of the support.
  double edge(std::size_t k) const noexcept { return origin + (static_cast<double>(k) - 0.5) * spacing; }
  double lower() const noexcept { return edge(0); }
  double upper() const noexcept { return edge(count); }

  bool operator==(const Grid1D&) const = default;
};

/// Piecewise-constant probability density on a Grid1D.
///
/// values[k] is the density on cell k, so sum(values) * spacing == 1.
class DiscreteDensity1D {
 public:
  /// Validates nonnegativity and unit mass (1e-12); throws std::invalid_argument.
  DiscreteDensity1D(Grid1D grid, std::vector<double> values);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  std::size_t size() const noexcept { return values_.size(); }
  double cell_mass(std::size_t k) const noexcept { return values_[k] * grid_.spacing; }
  bool strictly_positive() const noexcept;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

/// Piecewise-constant density on a rows x cols pixel grid centered at the origin.
///
/// Pixel (r, c) covers the square centered at
///   x = (c - (cols-1)/2) * pixel_size,  y = (r - (rows-1)/2) * pixel_size.
/// Values are mass per unit area in row-major order.
class DiscreteDensity2D {
 public:
  DiscreteDensity2D(std::size_t rows, std::size_t cols, double pixel_size, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double pixel_size() const noexcept { return pixel_; }
  std::span<const double> values() const noexcept { return values_; }
  double at(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
  double cell_mass(std::size_t r, std::size_t c) const noexcept { return at(r, c) * pixel_ * pixel_; }
  double x(std::size_t c) const noexcept;
  double y(std::size_t r) const noexcept;
  bool strictly_positive() const noexcept;
  bool same_grid(const DiscreteDensity2D& other) const noexcept;

 private:
  std::size_t rows_;
  std::size_t cols_;
  double pixel_;
  std::vector<double> values_;
};

/// Adds epsilon * (total raw mass) spread uniformly, then rescales to unit mass.
/// Throws "degenerate density" for all-zero input and "negative mass" for
/// negative entries.
DiscreteDensity1D normalize(const Grid1D& grid, std::span<const double> raw, double epsilon = kDefaultEpsilon);
DiscreteDensity2D normalize(std::size_t rows, std::size_t cols, double pixel_size, std::span<const double> raw,
                            double epsilon = kDefaultEpsilon);

/// Cumulative distribution of a DiscreteDensity1D.
///
/// values[k] is the inclusive cumulative mass of cells 0..k, i.e. the CDF at
/// the right edge of cell k. Between edges the CDF is linear.
class Cdf1D {
 public:
  Cdf1D(Grid1D grid, std::vector<double> values);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// CDF at the left edge of cell k (k = 0..count).
  double at_edge(std::size_t k) const noexcept { return k == 0 ? 0.0 : values_[k - 1]; }
  /// Mass of cell k.
  double width(std::size_t k) const noexcept { return at_edge(k + 1) - at_edge(k); }
  /// Continuous CDF evaluated anywhere on the line.
  double operator()(double t) const noexcept;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

Cdf1D cdf(const DiscreteDensity1D& d);

/// Left-continuous generalized inverse: the smallest t with CDF(t) >= p,
/// linearly interpolated inside the bracketing cell. Throws for p outside [0, 1].
double quantile(const Cdf1D& c, double p);

}  // namespace swk
