#include "swk/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <random>
#include <stdexcept>

#include "swk/parallel.hpp"

namespace swk {

namespace fs = std::filesystem;

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw std::runtime_error("truncated PGM header");
  return tok;
}

std::size_t pgm_number(std::istream& in) {
  const std::string tok = pgm_token(in);
  if (tok.find_first_not_of("0123456789") != std::string::npos) throw std::runtime_error("bad PGM header field");
  return static_cast<std::size_t>(std::stoul(tok));
}

}  // namespace

void GlcmSpec::validate() const {
  if (levels < 2) throw std::invalid_argument("levels must be at least 2");
  if (offsets.empty()) throw std::invalid_argument("offset list is empty");
  for (const auto& [dx, dy] : offsets) {
    if (dx == 0 && dy == 0) throw std::invalid_argument("offsets must be nonzero");
  }
}

GrayImage read_pgm(std::istream& in) {
  const std::string magic = pgm_token(in);
  if (magic != "P5" && magic != "P2") throw std::runtime_error("not a PGM file");
  GrayImage img;
  img.cols = pgm_number(in);
  img.rows = pgm_number(in);
  const std::size_t maxval = pgm_number(in);
  if (img.rows == 0 || img.cols == 0) throw std::runtime_error("empty PGM image");
  if (maxval == 0 || maxval > 65535) throw std::runtime_error("bad PGM maxval");
  const std::size_t n = img.rows * img.cols;
  img.pixels.resize(n);
  const double scale = 255.0 / static_cast<double>(maxval);
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v = pgm_number(in);
      if (v > maxval) throw std::runtime_error("PGM sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v) * scale;
    }
  } else {
    const std::size_t width = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(n * width);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw std::runtime_error("truncated PGM data");
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v = width == 1 ? raw[i] : (static_cast<std::size_t>(raw[2 * i]) << 8) | raw[2 * i + 1];
      if (v > maxval) throw std::runtime_error("PGM sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v) * scale;
    }
  }
  return img;
}

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_pgm(in);
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << image.cols << ' ' << image.rows << "\n255\n";
  for (double v : image.pixels) out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L))));
}

std::vector<double> glcm_counts(const GrayImage& image, const GlcmSpec& spec) {
  spec.validate();
  if (image.rows == 0 || image.cols == 0 || image.pixels.size() != image.rows * image.cols) {
    throw std::invalid_argument("image is empty or malformed");
  }
  const auto rows = static_cast<long>(image.rows);
  const auto cols = static_cast<long>(image.cols);
  for (const auto& [dx, dy] : spec.offsets) {
    if (std::labs(dx) >= cols || std::labs(dy) >= rows) throw std::invalid_argument("image smaller than offset");
  }
  const double top = *std::max_element(image.pixels.begin(), image.pixels.end());
  const double range = top <= 1.0 ? 1.0 : 255.0;
  const int L = spec.levels;
  std::vector<int> q(image.pixels.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double v = std::clamp(image.pixels[i] / range, 0.0, 1.0);
    q[i] = std::min(L - 1, static_cast<int>(std::floor(v * L)));
  }
  std::vector<double> counts(static_cast<std::size_t>(L * L), 0.0);
  for (const auto& [dx, dy] : spec.offsets) {
    for (long r = std::max(0L, -static_cast<long>(dy)); r < std::min(rows, rows - dy); ++r) {
      for (long c = std::max(0L, -static_cast<long>(dx)); c < std::min(cols, cols - dx); ++c) {
        const int a = q[static_cast<std::size_t>(r * cols + c)];
        const int b = q[static_cast<std::size_t>((r + dy) * cols + (c + dx))];
        counts[static_cast<std::size_t>(a * L + b)] += 1.0;
        if (spec.symmetric) counts[static_cast<std::size_t>(b * L + a)] += 1.0;
      }
    }
  }
  return counts;
}

DiscreteDensity2D glcm(const GrayImage& image, const GlcmSpec& spec, double epsilon) {
  const auto L = static_cast<std::size_t>(spec.levels);
  return normalize(L, L, 1.0 / static_cast<double>(L), glcm_counts(image, spec), epsilon);
}

LabeledDataset load_dataset(const fs::path& root, const GlcmSpec& spec, double epsilon) {
  spec.validate();
  if (!fs::is_directory(root)) throw std::invalid_argument("dataset root " + root.string() + " is not a directory");
  std::vector<fs::path> classes;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) classes.push_back(e.path());
  }
  std::sort(classes.begin(), classes.end());
  if (classes.empty()) throw std::invalid_argument("dataset root " + root.string() + " has no class directories");

  struct Item {
    fs::path path;
    int label;
  };
  std::vector<Item> items;
  LabeledDataset out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(classes[c])) {
      if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) items.push_back({f, static_cast<int>(c)});
    out.class_names.push_back(classes[c].filename().string());
  }

  std::vector<std::optional<DiscreteDensity2D>> densities(items.size());
  std::vector<std::string> errors(items.size());
  parallel_for(items.size(), [&](std::size_t i) {
    try {
      densities[i].emplace(glcm(read_pgm(items[i].path), spec, epsilon));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::vector<std::size_t> per_class(classes.size(), 0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string rel = fs::relative(items[i].path, root).generic_string();
    if (!densities[i]) {
      out.skipped.push_back({rel, errors[i]});
      continue;
    }
    out.densities.push_back(std::move(*densities[i]));
    out.labels.push_back(items[i].label);
    out.provenance.push_back(rel);
    ++per_class[static_cast<std::size_t>(items[i].label)];
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (per_class[c] == 0) throw std::invalid_argument("class '" + out.class_names[c] + "' has no readable images");
  }
  return out;
}

nlohmann::json manifest(const LabeledDataset& dataset, const GlcmSpec& spec) {
  nlohmann::json j;
  j["glcm"] = {{"levels", spec.levels}, {"symmetric", spec.symmetric}};
  j["glcm"]["offsets"] = nlohmann::json::array();
  for (const auto& [dx, dy] : spec.offsets) j["glcm"]["offsets"].push_back({dx, dy});
  j["classes"] = dataset.class_names;
  j["items"] = nlohmann::json::array();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    j["items"].push_back({{"source", dataset.provenance[i]},
                          {"label", dataset.labels[i]},
                          {"class", dataset.class_names[static_cast<std::size_t>(dataset.labels[i])]}});
  }
  j["skipped"] = nlohmann::json::array();
  for (const auto& s : dataset.skipped) j["skipped"].push_back({{"source", s.path}, {"reason", s.reason}});
  return j;
}

DiscreteDensity2D shift_density(const DiscreteDensity2D& base, int dx, int dy) {
  const auto rows = static_cast<long>(base.rows());
  const auto cols = static_cast<long>(base.cols());
  std::vector<double> v(base.values().size());
  for (long r = 0; r < rows; ++r) {
    const long rr = ((r + dy) % rows + rows) % rows;
    for (long c = 0; c < cols; ++c) {
      const long cc = ((c + dx) % cols + cols) % cols;
      v[static_cast<std::size_t>(rr * cols + cc)] = base.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
  }
  return DiscreteDensity2D(base.rows(), base.cols(), base.pixel_size(), std::move(v));
}

double wrapped_mass(const DiscreteDensity2D& base, int dx, int dy) {
  const auto rows = static_cast<long>(base.rows());
  const auto cols = static_cast<long>(base.cols());
  double m = 0.0;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (r + dy < 0 || r + dy >= rows || c + dx < 0 || c + dx >= cols) {
        m += base.cell_mass(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      }
    }
  }
  return m;
}

LabeledDataset synth_translates(const DiscreteDensity2D& base,
                                const std::vector<std::vector<std::array<int, 2>>>& groups, double noise,
                                std::uint64_t seed, double wrap_tolerance) {
  if (noise < 0.0) throw std::invalid_argument("noise must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  LabeledDataset out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.class_names.push_back("group" + std::to_string(g));
    for (const auto& [dx, dy] : groups[g]) {
      const double lost = wrapped_mass(base, dx, dy);
      if (lost > wrap_tolerance) {
        throw std::invalid_argument("shift (" + std::to_string(dx) + ", " + std::to_string(dy) +
                                    ") pushes mass " + std::to_string(lost) + " off the grid");
      }
      DiscreteDensity2D shifted = shift_density(base, dx, dy);
      if (noise > 0.0) {
        std::vector<double> v(shifted.values().begin(), shifted.values().end());
        for (double& x : v) x *= std::exp(noise * normal(rng));
        shifted = normalize(base.rows(), base.cols(), base.pixel_size(), v, 0.0);
      }
      out.densities.push_back(std::move(shifted));
      out.labels.push_back(static_cast<int>(g));
      out.provenance.push_back("shift " + std::to_string(dx) + " " + std::to_string(dy));
    }
  }
  return out;
}

DiscreteDensity2D gaussian_blob(std::size_t size, double sigma, double epsilon) {
  std::vector<double> v(size * size);
  const double mid = 0.5 * static_cast<double>(size - 1);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double x = static_cast<double>(c) - mid;
      const double y = static_cast<double>(r) - mid;
      v[r * size + c] = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
    }
  }
  return normalize(size, size, 1.0 / static_cast<double>(size), v, epsilon);
}

LabeledDataset translate_benchmark(const TranslateBenchmark& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<std::array<int, 2>>> groups(2);
  for (std::size_t g = 0; g < 2; ++g) {
    const double cx = (g == 0 ? -0.5 : 0.5) * spec.separation;
    while (groups[g].size() < spec.per_class) {
      const double u = unit(rng);
      const double v = unit(rng);
      if (u * u + v * v > 1.0) continue;
      groups[g].push_back({static_cast<int>(std::lround(cx + spec.spread * u)),
                           static_cast<int>(std::lround(spec.spread * v))});
    }
  }
  return synth_translates(gaussian_blob(spec.grid, spec.sigma), groups, spec.noise, seed + 1);
}

}  // namespace swk
