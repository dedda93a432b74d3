#include "swk/cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>

#include "json.hpp"
#include "swk/io.hpp"
#include "swk/kernels.hpp"
#include "swk/kmeans.hpp"
#include "swk/kpca.hpp"
#include "swk/metrics.hpp"
#include "swk/parallel.hpp"
#include "swk/sliced.hpp"
#include "swk/svm.hpp"
#include "swk/validation.hpp"

namespace swk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Data {
  std::vector<DiscreteDensity2D> densities;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<std::string> sources;
};

std::ofstream open_output(const ExperimentConfig& e, const fs::path& name) {
  const fs::path path = e.out / name;
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const ExperimentConfig& e, const fs::path& name, const json& j) {
  open_output(e, name) << j.dump(2) << '\n';
}

void write_resolved(const ExperimentConfig& e) {
  auto out = open_output(e, "resolved_config.txt");
  out << "# task=" << e.task << '\n';
  for (const auto& [k, v] : e.resolved) out << k << '=' << v << '\n';
}

Data from_labeled(LabeledDataset d) {
  return Data{std::move(d.densities), std::move(d.labels), std::move(d.class_names), std::move(d.provenance)};
}

Data load_density_files(const ExperimentConfig& e) {
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(e.data_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) dirs.push_back(e.data_dir);
  Data data;
  std::string first_file;
  for (std::size_t c = 0; c < dirs.size(); ++c) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dirs[c])) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("data_dir: " + dirs[c].string() + " contains no density files");
    data.class_names.push_back(dirs[c] == e.data_dir ? "all" : dirs[c].filename().string());
    for (const auto& f : files) {
      const std::string rel = fs::relative(f, e.data_dir).generic_string();
      DiscreteDensity2D d = [&] {
        try {
          return load_density_2d(f, e.epsilon);
        } catch (const std::invalid_argument& ex) {
          throw ConfigError(std::string("data_dir: ") + ex.what());
        }
      }();
      if (!data.densities.empty() && !d.same_grid(data.densities.front())) {
        throw ConfigError("data_dir: grid mismatch between " + first_file + " and " + rel);
      }
      if (data.densities.empty()) first_file = rel;
      data.densities.push_back(std::move(d));
      data.labels.push_back(static_cast<int>(c));
      data.sources.push_back(rel);
    }
  }
  return data;
}

Data load_data(const ExperimentConfig& e, std::ostream& log) {
  if (e.source == "densities") return load_density_files(e);
  if (e.source == "pgm") {
    LabeledDataset d = [&] {
      try {
        return load_dataset(e.data_dir, e.glcm, e.epsilon);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("data_dir: ") + ex.what());
      }
    }();
    for (const auto& s : d.skipped) log << "warning: skipped " << s.path << ": " << s.reason << '\n';
    write_json(e, "manifest.json", manifest(d, e.glcm));
    return from_labeled(std::move(d));
  }
  if (e.synthetic_kind == "lattice") {
    std::vector<std::vector<std::array<int, 2>>> groups(1);
    for (int i = -e.lattice_radius; i <= e.lattice_radius; ++i) {
      for (int j = -e.lattice_radius; j <= e.lattice_radius; ++j) {
        groups[0].push_back({i * e.lattice_step, j * e.lattice_step});
      }
    }
    try {
      return from_labeled(synth_translates(gaussian_blob(e.synthetic.grid, e.synthetic.sigma, e.epsilon), groups, 0.0,
                                           e.require_seed()));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("synthetic: ") + ex.what());
    }
  }
  try {
    return from_labeled(translate_benchmark(e.synthetic, e.require_seed()));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("synthetic: ") + ex.what());
  }
}

Template make_tpl(const ExperimentConfig& e, const Data& data) {
  const AngleSet angles(e.angles);
  if (e.template_policy == "dataset_mean") return make_template(data.densities, angles, e.t_count, e.epsilon);
  DiscreteDensity2D d = [&] {
    try {
      return load_density_2d(e.template_policy, e.epsilon);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("template: ") + ex.what());
    }
  }();
  if (!d.same_grid(data.densities.front())) throw ConfigError("template: grid differs from the dataset grid");
  return Template(std::move(d), angles, e.t_count);
}

std::vector<KernelSpec> candidates(KernelKind kind, const ExperimentConfig& e, const DatasetFeatures& f) {
  std::vector<KernelSpec> out;
  if (is_gaussian(kind)) {
    double scale = 1.0;
    if (e.gamma_relative) {
      scale = 1.0 / median_off_diagonal(kind == KernelKind::sw_gaussian ? f.sw_squared() : f.raw_squared());
    }
    for (double g : e.gammas) out.push_back({kind, g * scale, 1, 0});
  } else if (is_polynomial(kind)) {
    for (int d : e.degrees) {
      for (int o : e.offsets) out.push_back({kind, 1.0, d, o});
    }
  } else {
    out.push_back({kind, 1.0, 1, 0});
  }
  return out;
}

json spec_json(const KernelSpec& s) {
  return {{"kind", std::string(to_string(s.kind))}, {"gamma", s.gamma}, {"degree", s.degree}, {"offset", s.offset}};
}

void write_items(const ExperimentConfig& e, const Data& data) {
  auto out = open_output(e, "items.csv");
  out << "item,label,class,source\n";
  for (std::size_t i = 0; i < data.densities.size(); ++i) {
    out << i << ',' << data.labels[i] << ',' << data.class_names[static_cast<std::size_t>(data.labels[i])] << ','
        << data.sources[i] << '\n';
  }
}

double l1_error(const DiscreteDensity2D& a, const DiscreteDensity2D& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) acc += std::fabs(a.values()[i] - b.values()[i]);
  return acc * a.pixel_size() * a.pixel_size();
}

Eigen::MatrixXd circle_geodesic_squared(std::size_t points) {
  Eigen::MatrixXd d(points, points);
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < points; ++j) {
      const double gap = 2.0 * std::numbers::pi * std::fabs(static_cast<double>(i) - static_cast<double>(j)) /
                         static_cast<double>(points);
      const double g = std::min(gap, 2.0 * std::numbers::pi - gap);
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g * g;
    }
  }
  return d;
}

json pd_json(const PdCertificate& c) {
  return {{"pass", c.pass}, {"min_eigenvalue", c.min_eigenvalue}, {"max_abs_eigenvalue", c.max_abs_eigenvalue}};
}

json cnd_json(const CndCertificate& c) {
  return {{"pass", c.pass}, {"trials", c.trials}, {"violations", c.violations}, {"max_form", c.max_form}};
}

}  // namespace

int cmd_distance(const ExperimentConfig& e, std::ostream& log) {
  const Data data = load_data(e, log);
  if (data.densities.size() < 2) throw ConfigError("data_dir: distance needs at least two densities");
  const Template tpl = make_tpl(e, data);
  const DatasetFeatures f(data.densities, tpl);
  auto out = open_output(e, "distances.csv");
  out << "# sw_distance n=" << f.size() << " angles=" << e.angles << " t_count=" << tpl.t_count() << '\n';
  write_matrix(out, f.sw_squared().cwiseSqrt());
  write_items(e, data);
  log << "wrote " << f.size() << "x" << f.size() << " distance matrix\n";
  return kExitOk;
}

int cmd_pca(const ExperimentConfig& e, std::ostream& log) {
  const Data data = load_data(e, log);
  const Template tpl = make_tpl(e, data);
  const DatasetFeatures f(data.densities, tpl);
  auto cpv = open_output(e, "cpv.csv");
  auto coords = open_output(e, "coordinates.csv");
  cpv << "kernel,m,cpv\n";
  coords << "kernel,item,label";
  for (std::size_t k = 1; k <= e.components; ++k) coords << ",pc" << k;
  coords << '\n';
  for (KernelKind kind : e.kernels) {
    const KernelSpec spec = candidates(kind, e, f).front();
    const KpcaModel model = kpca_fit(gram(f, spec));
    const auto curve = model.cpv_curve();
    for (std::size_t m = 1; m < curve.size(); ++m) cpv << to_string(kind) << ',' << m << ',' << format_real(curve[m]) << '\n';
    const std::size_t m = std::min(e.components, model.components());
    const Eigen::MatrixXd z = kpca_training_coordinates(model, m);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      coords << to_string(kind) << ',' << i << ',' << data.labels[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < e.components; ++k) {
        coords << ',' << (k < m ? format_real(z(i, static_cast<Eigen::Index>(k))) : std::string("0"));
      }
      coords << '\n';
    }
    log << to_string(kind) << ": CPV(" << e.components << ") = " << model.cpv(std::min(e.components, curve.size() - 1))
        << "%\n";
  }
  return kExitOk;
}

int cmd_cluster(const ExperimentConfig& e, std::ostream& log) {
  const Data data = load_data(e, log);
  if (e.clusters > data.densities.size()) throw ConfigError("clusters: more clusters than densities");
  const Template tpl = make_tpl(e, data);
  const DatasetFeatures f(data.densities, tpl);
  const KernelSpec spec = candidates(e.kernels.front(), e, f).front();
  const GramMatrix g = gram(f, spec);
  const ClusterAssignment a = kernel_kmeans(g.entries, e.clusters, e.restarts, e.require_seed());
  const VMeasure v = v_measure_scores(data.labels, a.labels);
  bool monotone = true;
  for (std::size_t i = 1; i < a.inertia_trace.size(); ++i) {
    monotone = monotone && a.inertia_trace[i] <= a.inertia_trace[i - 1] * (1.0 + 1e-12) + 1e-15;
  }
  json j;
  j["kernel"] = spec_json(spec);
  j["clusters"] = e.clusters;
  j["labels"] = a.labels;
  j["truth"] = data.labels;
  j["inertia"] = a.inertia;
  j["inertia_trace"] = a.inertia_trace;
  j["inertia_monotone"] = monotone;
  j["iterations"] = a.iterations;
  j["converged"] = a.converged;
  j["restart"] = a.restart;
  j["v_measure"] = v.v;
  j["homogeneity"] = v.homogeneity;
  j["completeness"] = v.completeness;
  write_json(e, "cluster.json", j);
  log << "inertia " << a.inertia << ", V-measure " << v.v << '\n';
  return kExitOk;
}

int cmd_classify(const ExperimentConfig& e, std::ostream& log) {
  Data data = load_data(e, log);
  if (e.shuffle_labels) {
    std::mt19937_64 rng(e.require_seed() ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(data.labels.begin(), data.labels.end(), rng);
  }
  const Template tpl = make_tpl(e, data);
  const DatasetFeatures f(data.densities, tpl);
  std::vector<KernelGroup> groups;
  for (KernelKind kind : e.kernels) {
    KernelGroup g{std::string(to_string(kind)), {}};
    for (const auto& spec : candidates(kind, e, f)) g.candidates.push_back(gram(f, spec));
    groups.push_back(std::move(g));
  }
  CvOptions opt;
  opt.folds = e.folds;
  opt.repeats = e.repeats;
  opt.seed = e.require_seed();
  opt.c_grid = e.c_grid;
  opt.tolerance = e.svm_tolerance;
  const auto results = [&] {
    try {
      return cross_validate(groups, data.labels, opt);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("folds: ") + ex.what());
    }
  }();
  auto acc = open_output(e, "accuracy.csv");
  auto summary = open_output(e, "summary.csv");
  acc << "kernel,repeat,fold,accuracy,gamma,degree,offset,C\n";
  summary << "kernel,mean,std,repeats\n";
  for (const auto& r : results) {
    for (const auto& fr : r.folds) {
      acc << r.name << ',' << fr.repeat << ',' << fr.fold << ',' << format_real(fr.accuracy) << ','
          << format_real(fr.spec.gamma) << ',' << fr.spec.degree << ',' << fr.spec.offset << ',' << format_real(fr.C)
          << '\n';
    }
    summary << r.name << ',' << format_real(r.mean) << ',' << format_real(r.stddev) << ',' << e.repeats << '\n';
    log << r.name << ": " << 100.0 * r.mean << "% +- " << 100.0 * r.stddev << "%\n";
  }
  return kExitOk;
}

int cmd_certify(const ExperimentConfig& e, std::ostream& log) {
  const Data data = load_data(e, log);
  const Template tpl = make_tpl(e, data);
  const DatasetFeatures f(data.densities, tpl);
  json j;
  bool expected = true;
  const auto identity = certify_pd(Eigen::MatrixXd::Identity(3, 3), e.tolerance);
  j["identity"] = pd_json(identity);
  expected = expected && identity.pass;
  j["kernels"] = json::array();
  for (KernelKind kind : e.kernels) {
    for (const auto& spec : candidates(kind, e, f)) {
      const auto c = certify_pd(gram(f, spec), e.tolerance);
      json entry = pd_json(c);
      entry["spec"] = spec_json(spec);
      j["kernels"].push_back(entry);
      expected = expected && c.pass;
    }
  }
  const auto cnd = certify_cnd(f.sw_squared(), e.trials, e.tolerance, e.require_seed());
  j["cnd_sw_squared"] = cnd_json(cnd);
  expected = expected && cnd.pass;
  const auto control = certify_cnd(circle_geodesic_squared(4), e.trials, e.tolerance, e.require_seed());
  j["negative_control"] = cnd_json(control);
  j["negative_control"]["description"] = "squared geodesic distances of 4 equally spaced circle points";
  j["all_expected"] = expected && !control.pass;
  write_json(e, "certify.json", j);
  if (!expected) {
    log << "certification failed; see certify.json\n";
    return kExitNumerical;
  }
  log << "all kernels certified; negative control " << (control.pass ? "unexpectedly passed" : "failed as expected")
      << '\n';
  return kExitOk;
}

int cmd_invert(const ExperimentConfig& e, std::ostream& log) {
  const Data data = load_data(e, log);
  const Template tpl = make_tpl(e, data);
  json report;
  report["mode"] = e.invert_mode;
  int code = kExitOk;
  if (e.invert_mode == "zero") {
    const auto d = phi_invert(tpl.zero(), tpl);
    save_density(e.out / "zero.csv", d);
    report["l1_to_template"] = l1_error(d, tpl.density());
  } else if (e.invert_mode == "roundtrip") {
    fs::create_directories(e.out / "roundtrip");
    std::vector<double> errors(data.densities.size());
    std::vector<std::optional<DiscreteDensity2D>> rec(data.densities.size());
    parallel_for(data.densities.size(), [&](std::size_t i) {
      rec[i].emplace(phi_invert(phi_embed(data.densities[i], tpl), tpl));
      errors[i] = l1_error(*rec[i], data.densities[i]);
    });
    for (std::size_t i = 0; i < rec.size(); ++i) {
      save_density(e.out / "roundtrip" / ("item" + std::to_string(i) + ".csv"), *rec[i]);
    }
    report["l1_errors"] = errors;
    report["max_l1"] = *std::max_element(errors.begin(), errors.end());
  } else if (e.invert_mode == "file") {
    std::ifstream in(e.invert_phi);
    FeatureVector v = [&] {
      try {
        return read_phi(in);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("invert.phi: ") + ex.what());
      }
    }();
    if (!v.compatible(tpl.zero())) throw ConfigError("invert.phi: embedding grid differs from the template grid");
    try {
      save_density(e.out / "inverted.csv", phi_invert(v, tpl));
      report["ok"] = true;
    } catch (const std::domain_error& ex) {
      report["ok"] = false;
      report["error"] = ex.what();
      log << "inversion failed: " << ex.what() << '\n';
      code = kExitNumerical;
    }
  } else {
    const std::set<int> classes(data.labels.begin(), data.labels.end());
    if (classes.size() != 2) throw ConfigError("invert.mode: axis sampling needs exactly two classes");
    const DatasetFeatures f(data.densities, tpl);
    std::vector<FeatureVector> emb;
    for (std::size_t i = 0; i < f.size(); ++i) emb.push_back(f.embedding(i));
    const GramMatrix g = gram(f, KernelSpec{KernelKind::linear_phi, 1.0, 1, 0});
    const SvmModel model = svm_train(g, data.labels, e.c_grid.back(), e.svm_tolerance);
    const auto axis = svm_decision_axis(model, emb, tpl, e.steps);
    report["axis"] = json::array();
    fs::create_directories(e.out / "axis");
    std::size_t inverted = 0;
    for (std::size_t k = 0; k < axis.size(); ++k) {
      json s{{"s", axis[k].s}};
      if (axis[k].density) {
        save_density(e.out / "axis" / ("step" + std::to_string(k) + ".csv"), *axis[k].density);
        s["ok"] = true;
        ++inverted;
      } else {
        s["ok"] = false;
        s["error"] = axis[k].error;
        log << "warning: axis step " << k << " (s = " << format_real(axis[k].s) << "): " << axis[k].error << '\n';
      }
      report["axis"].push_back(s);
    }
    // Steps far from the mean may leave the monotone cone; only a fully failed axis is an error.
    if (inverted == 0) code = kExitNumerical;
  }
  write_json(e, "invert_report.json", report);
  return code;
}

int cmd_ingest(const ExperimentConfig& e, std::ostream& log) {
  LabeledDataset d = [&] {
    try {
      return load_dataset(e.data_dir, e.glcm, e.epsilon);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("data_dir: ") + ex.what());
    }
  }();
  for (const auto& s : d.skipped) log << "warning: skipped " << s.path << ": " << s.reason << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    fs::path rel = fs::path(d.provenance[i]).replace_extension(".csv");
    fs::create_directories((e.out / "densities" / rel).parent_path());
    save_density(e.out / "densities" / rel, d.densities[i]);
  }
  write_json(e, "manifest.json", manifest(d, e.glcm));
  log << "ingested " << d.size() << " images, skipped " << d.skipped.size() << '\n';
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Sliced Wasserstein kernels and learning"};
  app.require_subcommand(1);
  struct Flags {
    std::string config;
    std::vector<std::string> set;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> angles;
    std::optional<int> levels;
    std::string out;
  };
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> subcommands{
      {"distance", "pairwise SW distance matrix"},
      {"pca", "kernel PCA: CPV curve and coordinates"},
      {"cluster", "kernel k-means with inertia and V-measure"},
      {"classify", "SVM cross-validation accuracy per kernel"},
      {"certify", "PD and CND certification report"},
      {"invert", "embedding inversion and axis sampling"},
      {"ingest", "PGM directory to GLCM densities"},
  };
  for (const auto& [name, help] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "key=value configuration file");
    sub->add_option("--set", flags.set, "override one key (key=value), repeatable");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--angles", flags.angles, "number of projection angles");
    sub->add_option("--levels", flags.levels, "GLCM gray levels");
    sub->add_option("--out", flags.out, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string task = app.get_subcommands().front()->get_name();

  try {
    Config config = flags.config.empty() ? Config() : Config::load(flags.config);
    for (const auto& kv : flags.set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (flags.seed) config.set("seed", std::to_string(*flags.seed));
    if (flags.angles) config.set("angles", std::to_string(*flags.angles));
    if (flags.levels) config.set("levels", std::to_string(*flags.levels));
    if (!flags.out.empty()) config.set("out", flags.out);
    const ExperimentConfig e = resolve(config, task);
    fs::create_directories(e.out);
    write_resolved(e);
    if (task == "distance") return cmd_distance(e, std::cerr);
    if (task == "pca") return cmd_pca(e, std::cerr);
    if (task == "cluster") return cmd_cluster(e, std::cerr);
    if (task == "classify") return cmd_classify(e, std::cerr);
    if (task == "certify") return cmd_certify(e, std::cerr);
    if (task == "invert") return cmd_invert(e, std::cerr);
    return cmd_ingest(e, std::cerr);
  } catch (const ConfigError& ex) {
    std::cerr << "configuration error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "configuration error: " << ex.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& ex) {
    std::cerr << "numerical failure: " << ex.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace swk::cli
