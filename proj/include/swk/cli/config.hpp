#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swk/ingest.hpp"
#include "swk/kernels.hpp"

namespace swk::cli {

/// Invalid or missing configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key=value settings. Lines starting with '#' are comments.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct ExperimentConfig {
  std::string task;

  std::string source;
  std::filesystem::path data_dir;
  std::string synthetic_kind;
  TranslateBenchmark synthetic;
  int lattice_radius = 2;
  int lattice_step = 3;

  GlcmSpec glcm;
  double epsilon = kDefaultEpsilon;
  std::size_t angles = 180;
  std::size_t t_count = 0;
  std::string template_policy;

  std::vector<KernelKind> kernels;
  std::vector<double> gammas;
  bool gamma_relative = true;
  std::vector<int> degrees;
  std::vector<int> offsets;
  std::vector<double> c_grid;
  double svm_tolerance = 1e-4;

  std::size_t folds = 5;
  std::size_t repeats = 1;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;

  std::size_t clusters = 2;
  std::size_t restarts = 10;
  std::size_t components = 2;
  std::size_t trials = 1000;
  double tolerance = 1e-8;
  bool shuffle_labels = false;

  std::string invert_mode;
  std::filesystem::path invert_phi;
  std::size_t steps = 5;

  /// Every key with its effective value, defaults included.
  std::map<std::string, std::string> resolved;

  std::uint64_t require_seed() const;
};

/// Merges defaults for `task`, validates every field and checks that the
/// referenced paths exist. Throws ConfigError naming the offending key.
ExperimentConfig resolve(const Config& config, const std::string& task);

}  // namespace swk::cli
