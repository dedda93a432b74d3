#include "swk/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swk {

namespace {

constexpr double kMassTolerance = 1e-12;

long double total(std::span<const double> v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return s;
}

void check_entries(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite mass");
    if (x < 0.0) throw std::invalid_argument("negative mass");
  }
}

void check_unit_mass(long double sum, double cell_area) {
  const long double mass = sum * cell_area;
  if (std::fabs(static_cast<double>(mass - 1.0L)) > kMassTolerance) {
    throw std::invalid_argument("density mass is " + std::to_string(static_cast<double>(mass)) + ", expected 1");
  }
}

std::vector<double> regularize(std::span<const double> raw, double epsilon, double cell_area) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  check_entries(raw);
  const long double sum = total(raw);
  if (!(sum > 0.0L)) throw std::invalid_argument("degenerate density");
  const long double floor = static_cast<long double>(epsilon) * sum / static_cast<long double>(raw.size());
  const long double scale = 1.0L / ((sum + floor * static_cast<long double>(raw.size())) * cell_area);
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) out[k] = static_cast<double>((raw[k] + floor) * scale);
  return out;
}

}  // namespace

Grid1D::Grid1D(double origin_, double spacing_, std::size_t count_) : origin(origin_), spacing(spacing_), count(count_) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw std::invalid_argument("grid spacing must be > 0");
  if (count < 2) throw std::invalid_argument("grid needs at least 2 samples");
  if (!std::isfinite(origin)) throw std::invalid_argument("grid origin must be finite");
}

Grid1D Grid1D::covering(double lo, double hi, std::size_t count) {
  if (!(hi > lo)) throw std::invalid_argument("empty grid interval");
  const double h = (hi - lo) / static_cast<double>(count);
  return Grid1D(lo + 0.5 * h, h, count);
}

DiscreteDensity1D::DiscreteDensity1D(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.count) throw std::invalid_argument("density length does not match grid");
  check_entries(values_);
  check_unit_mass(total(values_), grid_.spacing);
}

bool DiscreteDensity1D::strictly_positive() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

DiscreteDensity2D::DiscreteDensity2D(std::size_t rows, std::size_t cols, double pixel_size, std::vector<double> values)
    : rows_(rows), cols_(cols), pixel_(pixel_size), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("empty 2D density");
  if (!(pixel_ > 0.0) || !std::isfinite(pixel_)) throw std::invalid_argument("pixel size must be > 0");
  if (values_.size() != rows_ * cols_) throw std::invalid_argument("density size does not match rows*cols");
  check_entries(values_);
  check_unit_mass(total(values_), pixel_ * pixel_);
}

double DiscreteDensity2D::x(std::size_t c) const noexcept {
  return (static_cast<double>(c) - 0.5 * static_cast<double>(cols_ - 1)) * pixel_;
}

double DiscreteDensity2D::y(std::size_t r) const noexcept {
  return (static_cast<double>(r) - 0.5 * static_cast<double>(rows_ - 1)) * pixel_;
}

bool DiscreteDensity2D::strictly_positive() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

bool DiscreteDensity2D::same_grid(const DiscreteDensity2D& other) const noexcept {
  return rows_ == other.rows_ && cols_ == other.cols_ && pixel_ == other.pixel_;
}

DiscreteDensity1D normalize(const Grid1D& grid, std::span<const double> raw, double epsilon) {
  if (raw.size() != grid.count) throw std::invalid_argument("raw length does not match grid");
  return DiscreteDensity1D(grid, regularize(raw, epsilon, grid.spacing));
}

DiscreteDensity2D normalize(std::size_t rows, std::size_t cols, double pixel_size, std::span<const double> raw,
                            double epsilon) {
  if (raw.size() != rows * cols) throw std::invalid_argument("raw size does not match rows*cols");
  if (!(pixel_size > 0.0)) throw std::invalid_argument("pixel size must be > 0");
  return DiscreteDensity2D(rows, cols, pixel_size, regularize(raw, epsilon, pixel_size * pixel_size));
}

Cdf1D::Cdf1D(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.count) throw std::invalid_argument("cdf length does not match grid");
  double prev = 0.0;
  for (double v : values_) {
    if (!(v >= prev)) throw std::invalid_argument("cdf must be nondecreasing and nonnegative");
    prev = v;
  }
  if (std::fabs(values_.back() - 1.0) > kMassTolerance) throw std::invalid_argument("cdf must end at 1");
}

double Cdf1D::operator()(double t) const noexcept {
  const double u = (t - grid_.lower()) / grid_.spacing;
  if (u <= 0.0) return 0.0;
  if (u >= static_cast<double>(grid_.count)) return 1.0;
  const auto k = static_cast<std::size_t>(u);
  const double frac = u - static_cast<double>(k);
  return at_edge(k) + frac * width(k);
}

Cdf1D cdf(const DiscreteDensity1D& d) {
  std::vector<double> values(d.size());
  long double acc = 0.0L;
  for (std::size_t k = 0; k < d.size(); ++k) {
    acc += static_cast<long double>(d[k]) * d.grid().spacing;
    values[k] = static_cast<double>(acc);
  }
  values.back() = 1.0;
  // Rounding in the last few cells must not break monotonicity after pinning.
  for (std::size_t k = values.size() - 1; k-- > 0;) values[k] = std::min(values[k], values[k + 1]);
  return Cdf1D(d.grid(), std::move(values));
}

double quantile(const Cdf1D& c, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  const auto values = c.values();
  const auto it = std::lower_bound(values.begin(), values.end(), p);
  const auto k = static_cast<std::size_t>(it - values.begin());
  if (k >= values.size()) return c.grid().upper();
  const double w = c.width(k);
  const double frac = w > 0.0 ? (p - c.at_edge(k)) / w : 0.0;
  return c.grid().edge(k) + std::clamp(frac, 0.0, 1.0) * c.grid().spacing;
}

}  // namespace swk
