#include "swk/cli/config.hpp"

#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "swk/io.hpp"

namespace swk::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kTasks{"distance", "pca", "cluster", "classify", "certify", "invert", "ingest"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::map<std::string, std::string> defaults(const std::string& task) {
  std::string kernels = "sw_gaussian";
  if (task == "pca") kernels = "linear_phi,euclid_linear";
  if (task == "classify") kernels = "euclid_linear,euclid_rbf,sw_gaussian,sw_poly";
  if (task == "certify") kernels = "sw_gaussian,sw_poly";
  return {
      {"source", "synthetic"},
      {"data_dir", ""},
      {"synthetic.kind", task == "pca" ? "lattice" : "benchmark"},
      {"synthetic.grid", "48"},
      {"synthetic.per_class", "40"},
      {"synthetic.separation", "20"},
      {"synthetic.spread", "2"},
      {"synthetic.sigma", "2"},
      {"synthetic.noise", "0.05"},
      {"synthetic.lattice_radius", "2"},
      {"synthetic.lattice_step", "3"},
      {"levels", "32"},
      {"glcm.symmetric", "true"},
      {"epsilon", "1e-08"},
      {"angles", "180"},
      {"t_count", "0"},
      {"template", "dataset_mean"},
      {"kernels", kernels},
      {"gammas", task == "certify" ? "0.01,0.1,1,10,100" : "0.1,1,10"},
      {"gamma_scale", task == "certify" ? "absolute" : "median"},
      {"degrees", "1,2,3"},
      {"offsets", "0,1"},
      {"c_grid", "0.1,1,10,100"},
      {"svm_tolerance", "0.0001"},
      {"folds", "5"},
      {"repeats", "1"},
      {"seed", ""},
      {"out", ""},
      {"clusters", "2"},
      {"restarts", "10"},
      {"components", "2"},
      {"trials", "1000"},
      {"tolerance", "1e-08"},
      {"shuffle_labels", "false"},
      {"invert.mode", "roundtrip"},
      {"invert.phi", ""},
      {"steps", "5"},
  };
}

class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& v) : v_(v) {}

  const std::string& text(const std::string& key) const { return v_.at(key); }

  double real(const std::string& key) const {
    try {
      return parse_real(text(key));
    } catch (const std::invalid_argument&) {
      throw ConfigError("config key '" + key + "': expected a number, got '" + text(key) + "'");
    }
  }

  long long integer(const std::string& key, long long lo) const {
    long long v = 0;
    try {
      v = parse_integer(text(key));
    } catch (const std::invalid_argument&) {
      throw ConfigError("config key '" + key + "': expected an integer, got '" + text(key) + "'");
    }
    if (v < lo) throw ConfigError("config key '" + key + "': must be at least " + std::to_string(lo));
    return v;
  }

  std::size_t count(const std::string& key, long long lo) const { return static_cast<std::size_t>(integer(key, lo)); }

  bool flag(const std::string& key) const {
    const std::string& t = text(key);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false");
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': list is empty");
    return out;
  }

  std::vector<double> reals(const std::string& key, bool positive) const {
    std::vector<double> out;
    for (const auto& s : list(key)) {
      double v = 0.0;
      try {
        v = parse_real(s);
      } catch (const std::invalid_argument&) {
        throw ConfigError("config key '" + key + "': '" + s + "' is not a number");
      }
      if (positive && !(v > 0.0)) throw ConfigError("config key '" + key + "': values must be positive");
      out.push_back(v);
    }
    return out;
  }

  std::vector<int> ints(const std::string& key) const {
    std::vector<int> out;
    for (const auto& s : list(key)) {
      try {
        out.push_back(static_cast<int>(parse_integer(s)));
      } catch (const std::invalid_argument&) {
        throw ConfigError("config key '" + key + "': '" + s + "' is not an integer");
      }
    }
    return out;
  }

 private:
  const std::map<std::string, std::string>& v_;
};

}  // namespace

Config Config::parse(std::istream& in) {
  Config c;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    c.set(key, trim(t.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file " + path.string() + " cannot be opened");
  return parse(in);
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw ConfigError("config key 'seed': required for this task");
  return *seed;
}

ExperimentConfig resolve(const Config& config, const std::string& task) {
  if (!kTasks.count(task)) throw ConfigError("unknown task '" + task + "'");
  auto values = defaults(task);
  for (const auto& [k, v] : config.values()) {
    if (!values.count(k)) throw ConfigError("unknown config key '" + k + "'");
    values[k] = v;
  }
  const Reader r(values);
  ExperimentConfig e;
  e.task = task;

  e.source = r.text("source");
  if (e.source != "synthetic" && e.source != "pgm" && e.source != "densities") {
    throw ConfigError("config key 'source': expected synthetic, pgm or densities");
  }
  if (task == "ingest" && e.source != "pgm") throw ConfigError("config key 'source': ingest reads pgm directories");
  e.data_dir = r.text("data_dir");
  if (e.source != "synthetic") {
    if (e.data_dir.empty()) throw ConfigError("config key 'data_dir': required for source " + e.source);
    if (!fs::is_directory(e.data_dir)) throw ConfigError("config key 'data_dir': " + e.data_dir.string() + " is not a directory");
  }
  e.synthetic_kind = r.text("synthetic.kind");
  if (e.synthetic_kind != "benchmark" && e.synthetic_kind != "lattice") {
    throw ConfigError("config key 'synthetic.kind': expected benchmark or lattice");
  }
  e.synthetic.grid = r.count("synthetic.grid", 4);
  e.synthetic.per_class = r.count("synthetic.per_class", 1);
  e.synthetic.separation = r.real("synthetic.separation");
  e.synthetic.spread = r.real("synthetic.spread");
  e.synthetic.sigma = r.real("synthetic.sigma");
  e.synthetic.noise = r.real("synthetic.noise");
  if (!(e.synthetic.sigma > 0.0)) throw ConfigError("config key 'synthetic.sigma': must be positive");
  if (e.synthetic.spread < 0.0) throw ConfigError("config key 'synthetic.spread': must be nonnegative");
  if (e.synthetic.noise < 0.0) throw ConfigError("config key 'synthetic.noise': must be nonnegative");
  e.lattice_radius = static_cast<int>(r.integer("synthetic.lattice_radius", 1));
  e.lattice_step = static_cast<int>(r.integer("synthetic.lattice_step", 1));

  e.glcm.levels = static_cast<int>(r.integer("levels", 2));
  e.glcm.symmetric = r.flag("glcm.symmetric");
  e.epsilon = r.real("epsilon");
  if (!(e.epsilon >= 0.0)) throw ConfigError("config key 'epsilon': must be nonnegative");
  e.angles = r.count("angles", 1);
  e.t_count = r.count("t_count", 0);
  if (e.t_count == 1) throw ConfigError("config key 't_count': must be 0 (default) or at least 2");
  e.template_policy = r.text("template");
  if (e.template_policy != "dataset_mean" && !fs::is_regular_file(e.template_policy)) {
    throw ConfigError("config key 'template': expected dataset_mean or an existing density file");
  }

  for (const auto& k : r.list("kernels")) {
    try {
      e.kernels.push_back(parse_kernel_kind(k));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("config key 'kernels': ") + ex.what());
    }
  }
  e.gammas = r.reals("gammas", true);
  const std::string scale = r.text("gamma_scale");
  if (scale != "median" && scale != "absolute") throw ConfigError("config key 'gamma_scale': expected median or absolute");
  e.gamma_relative = scale == "median";
  e.degrees = r.ints("degrees");
  for (int d : e.degrees) {
    if (d < 1) throw ConfigError("config key 'degrees': degrees must be positive");
  }
  e.offsets = r.ints("offsets");
  for (int o : e.offsets) {
    if (o != 0 && o != 1) throw ConfigError("config key 'offsets': offsets must be 0 or 1");
  }
  e.c_grid = r.reals("c_grid", true);
  e.svm_tolerance = r.real("svm_tolerance");
  if (!(e.svm_tolerance > 0.0)) throw ConfigError("config key 'svm_tolerance': must be positive");

  e.folds = r.count("folds", 2);
  e.repeats = r.count("repeats", 1);
  if (!r.text("seed").empty()) e.seed = static_cast<std::uint64_t>(r.integer("seed", 0));
  e.out = r.text("out");
  if (e.out.empty()) throw ConfigError("config key 'out': output directory required");

  e.clusters = r.count("clusters", 1);
  e.restarts = r.count("restarts", 1);
  e.components = r.count("components", 1);
  e.trials = r.count("trials", 1);
  e.tolerance = r.real("tolerance");
  if (!(e.tolerance >= 0.0)) throw ConfigError("config key 'tolerance': must be nonnegative");
  e.shuffle_labels = r.flag("shuffle_labels");

  e.invert_mode = r.text("invert.mode");
  if (e.invert_mode != "roundtrip" && e.invert_mode != "zero" && e.invert_mode != "file" && e.invert_mode != "axis") {
    throw ConfigError("config key 'invert.mode': expected roundtrip, zero, file or axis");
  }
  e.invert_phi = r.text("invert.phi");
  if (task == "invert" && e.invert_mode == "file" && !fs::is_regular_file(e.invert_phi)) {
    throw ConfigError("config key 'invert.phi': embedding file required for invert.mode=file");
  }
  e.steps = r.count("steps", 1);

  const bool randomized = e.source == "synthetic" || task == "cluster" || task == "classify" || task == "certify" ||
                          (task == "invert" && e.invert_mode == "axis");
  if (randomized) e.require_seed();

  e.resolved = values;
  return e;
}

}  // namespace swk::cli
