#include "swk/sliced.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "swk/parallel.hpp"
#include "swk/transport.hpp"

namespace swk {

namespace {

void require_compatible(const FeatureVector& a, const FeatureVector& b) {
  if (!a.compatible(b)) throw std::invalid_argument("feature vectors live on different grids");
}

void require_same_slicing(const SlicedRepresentation& a, const SlicedRepresentation& b) {
  if (!(a.angles() == b.angles()) || !(a.t_grid() == b.t_grid())) {
    throw std::invalid_argument("sinograms use different angle sets or t grids");
  }
}

}  // namespace

FeatureVector::FeatureVector(AngleSet angles, Grid1D t_grid, std::vector<double> values)
    : angles_(std::move(angles)), t_grid_(t_grid), values_(std::move(values)) {
  if (values_.size() != angles_.size() * t_grid_.count) throw std::invalid_argument("feature vector size mismatch");
}

bool FeatureVector::compatible(const FeatureVector& other) const noexcept {
  return angles_ == other.angles_ && t_grid_ == other.t_grid_;
}

FeatureVector& FeatureVector::operator+=(const FeatureVector& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

FeatureVector& FeatureVector::operator-=(const FeatureVector& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

FeatureVector& FeatureVector::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

FeatureVector operator+(FeatureVector a, const FeatureVector& b) { return a += b; }
FeatureVector operator-(FeatureVector a, const FeatureVector& b) { return a -= b; }
FeatureVector operator*(double s, FeatureVector v) { return v *= s; }

double inner(const FeatureVector& a, const FeatureVector& b) {
  require_compatible(a, b);
  const auto x = a.values();
  const auto y = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc * a.t_grid().spacing / static_cast<double>(a.rows());
}

double norm(const FeatureVector& v) { return std::sqrt(inner(v, v)); }

double distance(const FeatureVector& a, const FeatureVector& b) { return norm(a - b); }

Template::Template(DiscreteDensity2D density, const AngleSet& angles, std::size_t t_count)
    : density_(std::move(density)), sliced_(radon_forward(density_, angles, t_count)) {
  if (!density_.strictly_positive()) throw std::domain_error("positivity violated");
}

SlicedRepresentation Template::slice(const DiscreteDensity2D& image) const {
  if (!image.same_grid(density_)) throw std::invalid_argument("density is not on the template grid");
  return radon_forward(image, sliced_.angles(), sliced_.t_grid().count);
}

FeatureVector Template::zero() const {
  return FeatureVector(angles(), sliced_.t_grid(), std::vector<double>(angles().size() * t_count(), 0.0));
}

Template make_template(std::span<const DiscreteDensity2D> dataset, const AngleSet& angles, std::size_t t_count,
                       double epsilon) {
  if (dataset.empty()) throw std::invalid_argument("template needs a nonempty dataset");
  const auto& first = dataset.front();
  std::vector<double> mean(first.values().size(), 0.0);
  for (const auto& d : dataset) {
    if (!d.same_grid(first)) throw std::invalid_argument("dataset densities use different grids");
    const auto v = d.values();
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
  }
  for (double& m : mean) m /= static_cast<double>(dataset.size());
  return Template(normalize(first.rows(), first.cols(), first.pixel_size(), mean, epsilon), angles, t_count);
}

double sw_squared(const SlicedRepresentation& a, const SlicedRepresentation& b) {
  require_same_slicing(a, b);
  double acc = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) acc += wasserstein2_squared_1d(a.slice_cdf(l), b.slice_cdf(l));
  return acc / static_cast<double>(a.size());
}

double sw_distance(const DiscreteDensity2D& a, const DiscreteDensity2D& b, const AngleSet& angles,
                   std::size_t t_count) {
  if (!a.same_grid(b)) throw std::invalid_argument("grid mismatch");
  return std::sqrt(sw_squared(radon_forward(a, angles, t_count), radon_forward(b, angles, t_count)));
}

FeatureVector phi_embed(const SlicedRepresentation& sliced, const Template& tpl) {
  require_same_slicing(sliced, tpl.sliced());
  const std::size_t cols = sliced.t_grid().count;
  std::vector<double> values(sliced.size() * cols);
  parallel_for(sliced.size(), [&](std::size_t l) {
    const auto row = psi_embed(sliced.slice_cdf(l), tpl.sliced().slice_cdf(l));
    std::copy(row.begin(), row.end(), values.begin() + static_cast<std::ptrdiff_t>(l * cols));
  });
  return FeatureVector(sliced.angles(), sliced.t_grid(), std::move(values));
}

FeatureVector phi_embed(const DiscreteDensity2D& image, const Template& tpl) {
  return phi_embed(tpl.slice(image), tpl);
}

DiscreteDensity2D phi_invert(const FeatureVector& v, const Template& tpl) {
  const auto& ref = tpl.sliced();
  if (!(v.angles() == ref.angles()) || !(v.t_grid() == ref.t_grid())) {
    throw std::invalid_argument("feature vector does not match the template grid");
  }
  const std::size_t L = v.rows();
  std::vector<std::optional<DiscreteDensity1D>> rows(L);
  parallel_for(L, [&](std::size_t l) {
    try {
      rows[l].emplace(psi_invert(v.row(l), ref.slice(l)));
    } catch (const std::domain_error& e) {
      throw std::domain_error(std::string(e.what()) + " at angle index " + std::to_string(l) +
                              " (theta = " + std::to_string(ref.angles()[l]) + ")");
    }
  });
  std::vector<DiscreteDensity1D> slices;
  slices.reserve(L);
  for (auto& r : rows) slices.push_back(std::move(*r));
  const SlicedRepresentation sinogram(ref.angles(), ref.t_grid(), std::move(slices));
  const auto& d = tpl.density();
  return radon_inverse(sinogram, d.rows(), d.cols(), d.pixel_size());
}

}  // namespace swk
