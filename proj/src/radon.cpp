#include "swk/radon.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

#include "swk/parallel.hpp"

namespace swk {

namespace {

double diagonal(const DiscreteDensity2D& image) {
  const auto r = static_cast<double>(image.rows());
  const auto c = static_cast<double>(image.cols());
  return image.pixel_size() * std::sqrt(r * r + c * c);
}

// Bilinear interpolation on pixel centers, zero outside the image.
class Bilinear {
 public:
  explicit Bilinear(const DiscreteDensity2D& image)
      : image_(image),
        inv_h_(1.0 / image.pixel_size()),
        cx_(0.5 * static_cast<double>(image.cols() - 1)),
        cy_(0.5 * static_cast<double>(image.rows() - 1)),
        rows_(static_cast<long>(image.rows())),
        cols_(static_cast<long>(image.cols())) {}

  double operator()(double x, double y) const noexcept {
    const double u = x * inv_h_ + cx_;
    const double v = y * inv_h_ + cy_;
    const double fu = std::floor(u);
    const double fv = std::floor(v);
    const long c0 = static_cast<long>(fu);
    const long r0 = static_cast<long>(fv);
    if (c0 < -1 || r0 < -1 || c0 >= cols_ || r0 >= rows_) return 0.0;
    const double du = u - fu;
    const double dv = v - fv;
    return (1.0 - dv) * ((1.0 - du) * pixel(r0, c0) + du * pixel(r0, c0 + 1)) +
           dv * ((1.0 - du) * pixel(r0 + 1, c0) + du * pixel(r0 + 1, c0 + 1));
  }

 private:
  double pixel(long r, long c) const noexcept {
    if (r < 0 || c < 0 || r >= rows_ || c >= cols_) return 0.0;
    return image_.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }

  const DiscreteDensity2D& image_;
  double inv_h_;
  double cx_;
  double cy_;
  long rows_;
  long cols_;
};

void check_coverage(const DiscreteDensity2D& image, const AngleSet& angles, const Grid1D& t_grid) {
  // Bounding box of the pixels carrying mass.
  std::size_t r_lo = image.rows(), r_hi = 0, c_lo = image.cols(), c_hi = 0;
  for (std::size_t r = 0; r < image.rows(); ++r) {
    for (std::size_t c = 0; c < image.cols(); ++c) {
      if (image.at(r, c) > 0.0) {
        r_lo = std::min(r_lo, r);
        r_hi = std::max(r_hi, r);
        c_lo = std::min(c_lo, c);
        c_hi = std::max(c_hi, c);
      }
    }
  }
  const double h = image.pixel_size();
  const double xs[2] = {image.x(c_lo) - 0.5 * h, image.x(c_hi) + 0.5 * h};
  const double ys[2] = {image.y(r_lo) - 0.5 * h, image.y(r_hi) + 0.5 * h};
  const double slack = 1e-9 * t_grid.spacing;
  for (double theta : angles.angles()) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    for (double x : xs) {
      for (double y : ys) {
        const double t = x * ct + y * st;
        if (t < t_grid.lower() - slack || t > t_grid.upper() + slack) {
          throw std::invalid_argument("truncated projection");
        }
      }
    }
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

AngleSet::AngleSet(std::size_t count) {
  if (count < 1) throw std::invalid_argument("angle set needs at least one angle");
  angles_.resize(count);
  for (std::size_t l = 0; l < count; ++l) {
    angles_[l] = static_cast<double>(l) * std::numbers::pi / static_cast<double>(count);
  }
}

SlicedRepresentation::SlicedRepresentation(AngleSet angles, Grid1D t_grid, std::vector<DiscreteDensity1D> slices)
    : angles_(std::move(angles)), t_grid_(t_grid), slices_(std::move(slices)) {
  if (slices_.size() != angles_.size()) throw std::invalid_argument("one slice per angle required");
  cdfs_.reserve(slices_.size());
  for (const auto& s : slices_) {
    if (!(s.grid() == t_grid_)) throw std::invalid_argument("slice grid does not match sinogram t grid");
    cdfs_.push_back(cdf(s));
  }
}

std::size_t default_t_count(std::size_t rows, std::size_t cols) {
  const std::size_t n = std::max<std::size_t>(std::max(rows, cols), 2);
  return n + (n % 2);
}

Grid1D default_t_grid(const DiscreteDensity2D& image, std::size_t t_count) {
  if (t_count == 0) t_count = default_t_count(image.rows(), image.cols());
  const double d = diagonal(image);
  return Grid1D::covering(-0.5 * d, 0.5 * d, t_count);
}

std::vector<double> radon_project(const DiscreteDensity2D& image, double theta, const Grid1D& t_grid) {
  const Bilinear sample(image);
  // Origin-symmetric ray lattice at half-pixel steps; pixel centers fall on
  // lattice cell boundaries, so axis-aligned rays integrate the interpolant exactly.
  const double dg = 0.5 * image.pixel_size();
  const double radius = 0.5 * diagonal(image) + image.pixel_size();
  const auto half_steps = static_cast<std::size_t>(std::ceil(radius / dg));
  const std::size_t steps = 2 * half_steps;
  const double g0 = -static_cast<double>(half_steps) * dg;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);

  // Each output value is the mean over rays spread across its t cell, spaced
  // at most 3/4 of a pixel apart.
  const int sub_rays = std::max(1, static_cast<int>(std::ceil(t_grid.spacing / (0.75 * image.pixel_size()))));
  std::vector<double> out(t_grid.count, 0.0);
  for (std::size_t j = 0; j < t_grid.count; ++j) {
    double cell = 0.0;
    for (int q = 0; q < sub_rays; ++q) {
      const double t = t_grid.position(j) + ((q + 0.5) / sub_rays - 0.5) * t_grid.spacing;
      if (std::fabs(t) >= radius) continue;
      const double half = std::sqrt(radius * radius - t * t);
      const double first = std::max(0.0, std::floor((-half - g0) / dg - 0.5));
      const double last = std::min(static_cast<double>(steps), std::ceil((half - g0) / dg + 0.5));
      double acc = 0.0;
      for (auto m = static_cast<std::size_t>(first); m < static_cast<std::size_t>(last); ++m) {
        const double g = g0 + (static_cast<double>(m) + 0.5) * dg;
        acc += sample(t * ct - g * st, t * st + g * ct);
      }
      cell += acc;
    }
    out[j] = cell * dg / sub_rays;
  }
  return out;
}

SlicedRepresentation radon_forward(const DiscreteDensity2D& image, const AngleSet& angles, std::size_t t_count,
                                   double epsilon) {
  const Grid1D t_grid = default_t_grid(image, t_count);
  std::vector<std::vector<double>> raw(angles.size());
  parallel_for(angles.size(), [&](std::size_t l) { raw[l] = radon_project(image, angles[l], t_grid); });
  std::vector<DiscreteDensity1D> slices;
  slices.reserve(angles.size());
  for (const auto& r : raw) slices.push_back(normalize(t_grid, r, epsilon));
  return SlicedRepresentation(angles, t_grid, std::move(slices));
}

SlicedRepresentation radon_forward(const DiscreteDensity2D& image, const AngleSet& angles, const Grid1D& t_grid,
                                   double epsilon) {
  check_coverage(image, angles, t_grid);
  std::vector<std::vector<double>> raw(angles.size());
  parallel_for(angles.size(), [&](std::size_t l) { raw[l] = radon_project(image, angles[l], t_grid); });
  std::vector<DiscreteDensity1D> slices;
  slices.reserve(angles.size());
  for (const auto& r : raw) slices.push_back(normalize(t_grid, r, epsilon));
  return SlicedRepresentation(angles, t_grid, std::move(slices));
}

DiscreteDensity2D radon_inverse(const SlicedRepresentation& sinogram, std::size_t rows, std::size_t cols) {
  const Grid1D& tg = sinogram.t_grid();
  const double span = tg.spacing * static_cast<double>(tg.count);
  const auto r = static_cast<double>(rows);
  const auto c = static_cast<double>(cols);
  return radon_inverse(sinogram, rows, cols, span / std::sqrt(r * r + c * c));
}

DiscreteDensity2D radon_inverse(const SlicedRepresentation& sinogram, std::size_t rows, std::size_t cols,
                                double pixel_size, double epsilon) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty reconstruction grid");
  const Grid1D& tg = sinogram.t_grid();
  const std::size_t n = tg.count;
  const double dt = tg.spacing;
  const std::size_t padded = next_pow2(2 * n);

  // Spatial Ram-Lak kernel, wrapped for circular convolution.
  std::vector<double> kernel(padded, 0.0);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  kernel[0] = 1.0 / (4.0 * dt * dt);
  for (std::size_t k = 1; k < n; k += 2) {
    const double v = -1.0 / (static_cast<double>(k * k) * pi2 * dt * dt);
    kernel[k] = v;
    kernel[padded - k] = v;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> kernel_hat;
  fft.fwd(kernel_hat, kernel);

  const std::size_t L = sinogram.size();
  std::vector<std::vector<double>> filtered(L);
  parallel_for(L, [&](std::size_t l) {
    Eigen::FFT<double> local;
    std::vector<double> buf(padded, 0.0);
    const auto s = sinogram.slice(l).values();
    std::copy(s.begin(), s.end(), buf.begin());
    std::vector<std::complex<double>> spec;
    local.fwd(spec, buf);
    for (std::size_t k = 0; k < padded; ++k) spec[k] *= kernel_hat[k];
    std::vector<double> out;
    local.inv(out, spec);
    out.resize(n);
    for (double& v : out) v *= dt;
    filtered[l] = std::move(out);
  });

  std::vector<double> cosines(L), sines(L);
  for (std::size_t l = 0; l < L; ++l) {
    cosines[l] = std::cos(sinogram.angles()[l]);
    sines[l] = std::sin(sinogram.angles()[l]);
  }

  const double cx = 0.5 * static_cast<double>(cols - 1);
  const double cy = 0.5 * static_cast<double>(rows - 1);
  const double weight = std::numbers::pi / static_cast<double>(L);
  std::vector<double> image(rows * cols, 0.0);
  parallel_for(rows, [&](std::size_t r) {
    const double y = (static_cast<double>(r) - cy) * pixel_size;
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = (static_cast<double>(c) - cx) * pixel_size;
      double acc = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        const double u = (x * cosines[l] + y * sines[l] - tg.origin) / dt;
        const double fu = std::floor(u);
        if (fu < 0.0 || fu >= static_cast<double>(n - 1)) continue;
        const auto k = static_cast<std::size_t>(fu);
        const double a = u - fu;
        acc += (1.0 - a) * filtered[l][k] + a * filtered[l][k + 1];
      }
      image[r * cols + c] = std::max(0.0, acc * weight);
    }
  });
  return normalize(rows, cols, pixel_size, image, epsilon);
}

}  // namespace swk
