#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "swk/density.hpp"
#include "swk/ingest.hpp"

namespace swk::test {

struct Bump1D {
  double mean;
  double sigma;
  double weight;
};

inline DiscreteDensity1D mixture_1d(const Grid1D& grid, const std::vector<Bump1D>& bumps,
                                    double epsilon = kDefaultEpsilon) {
  std::vector<double> v(grid.count, 0.0);
  for (std::size_t k = 0; k < grid.count; ++k) {
    const double x = grid.position(k);
    for (const auto& b : bumps) {
      const double z = (x - b.mean) / b.sigma;
      v[k] += b.weight * std::exp(-0.5 * z * z) / b.sigma;
    }
  }
  return normalize(grid, v, epsilon);
}

inline DiscreteDensity1D gaussian_1d(const Grid1D& grid, double mean, double sigma, double epsilon = kDefaultEpsilon) {
  return mixture_1d(grid, {{mean, sigma, 1.0}}, epsilon);
}

/// 1 to 3 Gaussian components with means in [-3, 3] and sigma in [0.5, 1.5].
inline DiscreteDensity1D random_mixture_1d(const Grid1D& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mean(-3.0, 3.0), sigma(0.5, 1.5), weight(0.2, 1.0);
  const int parts = 1 + static_cast<int>(rng() % 3);
  std::vector<Bump1D> bumps;
  for (int i = 0; i < parts; ++i) bumps.push_back({mean(rng), sigma(rng), weight(rng)});
  return mixture_1d(grid, bumps);
}

struct Bump2D {
  double x;
  double y;
  double sigma;
  double weight;
};

/// Gaussian mixture on an n x n grid covering [-half, half]^2.
inline DiscreteDensity2D mixture_2d(std::size_t n, double half, const std::vector<Bump2D>& bumps,
                                    double epsilon = kDefaultEpsilon) {
  const double h = 2.0 * half / static_cast<double>(n);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double x = (static_cast<double>(c) - 0.5 * static_cast<double>(n - 1)) * h;
      const double y = (static_cast<double>(r) - 0.5 * static_cast<double>(n - 1)) * h;
      for (const auto& b : bumps) {
        const double dx = x - b.x;
        const double dy = y - b.y;
        v[r * n + c] += b.weight * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma)) / (b.sigma * b.sigma);
      }
    }
  }
  return normalize(n, n, h, v, epsilon);
}

/// 1 to 3 components, centers in [-2.5, 2.5]^2, sigma in [0.6, 1.4], on [-6, 6]^2.
inline DiscreteDensity2D random_mixture_2d(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> center(-2.5, 2.5), sigma(0.6, 1.4), weight(0.3, 1.0);
  const int parts = 1 + static_cast<int>(rng() % 3);
  std::vector<Bump2D> bumps;
  for (int i = 0; i < parts; ++i) bumps.push_back({center(rng), center(rng), sigma(rng), weight(rng)});
  return mixture_2d(n, 6.0, bumps);
}

inline DiscreteDensity2D two_bumps(std::size_t n) {
  return mixture_2d(n, 6.0, {{-1.5, 0.5, 1.0, 1.0}, {1.8, -1.0, 0.8, 0.7}});
}

/// Smoothed random texture: white noise box-blurred with a random radius and
/// contrast, so different draws give visibly different co-occurrence spreads.
inline GrayImage random_texture(std::size_t size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int radius = 1 + static_cast<int>(rng() % 3);
  const double contrast = 0.3 + 0.7 * u(rng);
  const double bias = u(rng) * (1.0 - contrast);
  std::vector<double> noise(size * size);
  for (double& v : noise) v = u(rng);
  GrayImage img{size, size, std::vector<double>(size * size)};
  const auto n = static_cast<long>(size);
  for (long r = 0; r < n; ++r) {
    for (long c = 0; c < n; ++c) {
      double acc = 0.0;
      int count = 0;
      for (long dr = -radius; dr <= radius; ++dr) {
        for (long dc = -radius; dc <= radius; ++dc) {
          acc += noise[static_cast<std::size_t>(((r + dr + n) % n) * n + (c + dc + n) % n)];
          ++count;
        }
      }
      // Blurred noise concentrates near 0.5; stretch it back out.
      const double v = std::clamp(0.5 + (acc / count - 0.5) * (1.0 + 2.0 * radius), 0.0, 1.0);
      img.pixels[static_cast<std::size_t>(r * n + c)] = 255.0 * (bias + contrast * v);
    }
  }
  return img;
}

inline std::vector<DiscreteDensity2D> random_glcms(std::size_t count, std::mt19937_64& rng, int levels = 32) {
  GlcmSpec spec;
  spec.levels = levels;
  std::vector<DiscreteDensity2D> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(glcm(random_texture(48, rng), spec));
  return out;
}

inline double l1(const DiscreteDensity1D& a, const DiscreteDensity1D& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::fabs(a[k] - b[k]);
  return acc * a.grid().spacing;
}

inline double l1(const DiscreteDensity2D& a, const DiscreteDensity2D& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) acc += std::fabs(a.values()[i] - b.values()[i]);
  return acc * a.pixel_size() * a.pixel_size();
}

}  // namespace swk::test
