#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "swk/density.hpp"

namespace swk {

struct GlcmSpec {
  int levels = 32;
  /// (dx, dy): pixel (r, c) pairs with (r + dy, c + dx).
  std::vector<std::pair<int, int>> offsets{{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  bool symmetric = true;

  void validate() const;
};

struct GrayImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Row-major intensities.
  std::vector<double> pixels;
};

/// Binary (P5) or ASCII (P2) PGM, intensities rescaled to [0, 255].
/// Throws std::runtime_error on malformed input.
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Raw co-occurrence counts (levels x levels, row-major) before normalization.
/// Intensities are taken on [0, 1] when the image maximum is at most 1,
/// otherwise on [0, 255], and binned uniformly into `levels` bins.
std::vector<double> glcm_counts(const GrayImage& image, const GlcmSpec& spec);

/// Normalized co-occurrence density on a levels x levels grid with pixel size
/// 1/levels. Throws std::invalid_argument when the image is smaller than an
/// offset.
DiscreteDensity2D glcm(const GrayImage& image, const GlcmSpec& spec = GlcmSpec(),
                       double epsilon = kDefaultEpsilon);

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct LabeledDataset {
  std::vector<DiscreteDensity2D> densities;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  /// Source of each item.
  std::vector<std::string> provenance;
  std::vector<SkippedFile> skipped;

  std::size_t size() const noexcept { return densities.size(); }
};

/// root/<class>/*.pgm in lexicographic order, one label per class directory.
/// Unreadable images are skipped and recorded; a class left without images
/// throws std::invalid_argument.
LabeledDataset load_dataset(const std::filesystem::path& root, const GlcmSpec& spec = GlcmSpec(),
                            double epsilon = kDefaultEpsilon);

nlohmann::json manifest(const LabeledDataset& dataset, const GlcmSpec& spec);

/// Circular shift by (dx, dy) whole pixels.
DiscreteDensity2D shift_density(const DiscreteDensity2D& base, int dx, int dy);

/// Mass carried across the border by a circular shift.
double wrapped_mass(const DiscreteDensity2D& base, int dx, int dy);

/// One class per group of pixel shifts. Each item is the shifted base with
/// optional multiplicative log-normal noise, renormalized. Throws
/// std::invalid_argument when a shift wraps more than `wrap_tolerance` mass.
LabeledDataset synth_translates(const DiscreteDensity2D& base,
                                const std::vector<std::vector<std::array<int, 2>>>& groups, double noise,
                                std::uint64_t seed, double wrap_tolerance = 1e-6);

/// Isotropic Gaussian blob of standard deviation `sigma` pixels at the grid
/// center, regularized and normalized.
DiscreteDensity2D gaussian_blob(std::size_t size, double sigma, double epsilon = kDefaultEpsilon);

struct TranslateBenchmark {
  std::size_t grid = 48;
  std::size_t per_class = 40;
  /// Distance between the two class centers, in pixels.
  double separation = 20.0;
  /// Radius of the within-class shift disk, in pixels.
  double spread = 2.0;
  double sigma = 2.0;
  double noise = 0.05;
};

/// Two classes of translates of one blob, centers separated along x.
LabeledDataset translate_benchmark(const TranslateBenchmark& spec, std::uint64_t seed);

}  // namespace swk
