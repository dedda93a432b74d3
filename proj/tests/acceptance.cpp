// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "swk/cli/commands.hpp"
#include "swk/ingest.hpp"
#include "swk/kernels.hpp"
#include "swk/kmeans.hpp"
#include "swk/kpca.hpp"
#include "swk/metrics.hpp"
#include "swk/sliced.hpp"
#include "swk/transport.hpp"
#include "swk/validation.hpp"

using namespace swk;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double psi_distance(const std::vector<double>& a, const std::vector<double>& b, double spacing) {
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return riemann_norm(d, spacing);
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  const auto g = Grid1D::covering(-20.0, 20.0, 1024);
  const auto a = test::gaussian_1d(g, 0.0, 1.0);
  const auto b = test::gaussian_1d(g, 2.0, 3.0);
  const double w = wasserstein2_1d(a, b);
  const double t = seconds_since(t0);
  const double err = std::fabs(w - std::sqrt(8.0));
  return {err <= 1e-2 && t < 0.1,
          "W2 = " + fmt("%.6f", w) + ", |err| = " + fmt("%.2e", err) + ", " + fmt("%.4f", t) + " s"};
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2002);
  double worst1 = 0.0;
  const auto g = Grid1D::covering(-8.0, 8.0, 512);
  const auto tpl1 = test::gaussian_1d(g, 0.0, 1.5);
  for (int i = 0; i < 25; ++i) {
    const auto a = test::random_mixture_1d(g, rng);
    const auto b = test::random_mixture_1d(g, rng);
    const double w = wasserstein2_1d(a, b);
    const double e = psi_distance(psi_embed(a, tpl1), psi_embed(b, tpl1), g.spacing);
    worst1 = std::max(worst1, std::fabs(e - w) / w);
  }
  std::vector<DiscreteDensity2D> set;
  for (int i = 0; i < 50; ++i) set.push_back(test::random_mixture_2d(64, rng));
  const auto tpl = make_template(set, AngleSet(180), 512);
  std::vector<SlicedRepresentation> sliced;
  std::vector<FeatureVector> phi;
  for (const auto& d : set) {
    sliced.push_back(tpl.slice(d));
    phi.push_back(phi_embed(sliced.back(), tpl));
  }
  double worst2 = 0.0;
  for (std::size_t i = 0; i < 50; i += 2) {
    const double sw = std::sqrt(sw_squared(sliced[i], sliced[i + 1]));
    worst2 = std::max(worst2, std::fabs(distance(phi[i], phi[i + 1]) - sw) / sw);
  }
  const double t = seconds_since(t0);
  return {worst1 <= 1e-3 && worst2 <= 1e-3 && t < 30.0,
          "worst relative error 1D " + fmt("%.2e", worst1) + ", 2D " + fmt("%.2e", worst2) + " (512 cells/samples), " +
              fmt("%.1f", t) + " s"};
}

Outcome criterion3() {
  const auto base = gaussian_blob(64, 4.0);
  const AngleSet angles(180);
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<int> shift(-8, 8);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    int dx = 0, dy = 0;
    while (dx == 0 && dy == 0) {
      dx = shift(rng);
      dy = shift(rng);
    }
    const double expected = std::hypot(dx, dy) * base.pixel_size() / std::sqrt(2.0);
    const double sw = sw_distance(base, shift_density(base, dx, dy), angles);
    worst = std::max(worst, std::fabs(sw - expected) / expected);
  }
  std::vector<std::vector<std::array<int, 2>>> lattice(1);
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) lattice[0].push_back({3 * i, 3 * j});
  const auto family = synth_translates(gaussian_blob(48, 2.0), lattice, 0.0, 1);
  const auto tpl = make_template(family.densities, angles);
  const auto model = kpca_fit(gram(family.densities, KernelSpec{KernelKind::linear_phi}, tpl));
  const double cpv2 = model.cpv(2);
  return {worst <= 0.02 && cpv2 >= 99.0,
          "translate SW worst relative error " + fmt("%.2e", worst) + " over 10 shifts; lattice CPV(2) = " +
              fmt("%.4f", cpv2) + "%"};
}

Outcome criterion4() {
  std::mt19937_64 rng(4004);
  const auto set = test::random_glcms(20, rng);
  const auto tpl = make_template(set, AngleSet(180));
  const DatasetFeatures f(set, tpl);
  bool pass = true;
  double worst = 1.0;
  int checked = 0;
  for (double gamma : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const auto c = certify_pd(gram(f, KernelSpec{KernelKind::sw_gaussian, gamma}), 1e-8);
    pass = pass && c.pass;
    worst = std::min(worst, c.min_eigenvalue / c.max_abs_eigenvalue);
    ++checked;
  }
  for (int d : {1, 2, 3}) {
    for (int o : {0, 1}) {
      const auto c = certify_pd(gram(f, KernelSpec{KernelKind::sw_poly, 1.0, d, o}), 1e-8);
      pass = pass && c.pass;
      worst = std::min(worst, c.min_eigenvalue / c.max_abs_eigenvalue);
      ++checked;
    }
  }
  return {pass, std::to_string(checked) + " Gram matrices over 20 GLCM densities; lowest min_eig/lambda_max = " +
                    fmt("%.2e", worst)};
}

Outcome criterion5() {
  std::mt19937_64 rng(5005);
  const std::size_t n = 20;
  const auto g = Grid1D::covering(-8.0, 8.0, 512);
  std::vector<DiscreteDensity1D> d1;
  for (std::size_t i = 0; i < n; ++i) d1.push_back(test::random_mixture_1d(g, rng));
  Eigen::MatrixXd w2(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w2(i, j) = i == j ? 0.0 : std::pow(wasserstein2_1d(d1[i], d1[j]), 2);
  std::vector<DiscreteDensity2D> d2;
  for (std::size_t i = 0; i < n; ++i) d2.push_back(test::random_mixture_2d(48, rng));
  const auto tpl = make_template(d2, AngleSet(180));
  const DatasetFeatures f(d2, tpl);
  const auto c1 = certify_cnd(w2, 1000, 1e-8);
  const auto c2 = certify_cnd(f.sw_squared(), 1000, 1e-8);

  Eigen::MatrixXd circle(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const int steps = std::min((i - j + 4) % 4, (j - i + 4) % 4);
      const double arc = std::numbers::pi * steps / 2.0;
      circle(i, j) = arc * arc;
    }
  }
  const auto control = certify_cnd(circle, 1000, 1e-8);
  return {c1.pass && c2.pass && control.violations > 0,
          "max form W2^2 " + fmt("%.2e", c1.max_form) + ", SW^2 " + fmt("%.2e", c2.max_form) +
              "; circle control positive in " + std::to_string(control.violations) + "/1000"};
}

Outcome criterion6() {
  std::mt19937_64 rng(6006);
  const auto g = Grid1D::covering(-8.0, 8.0, 256);
  std::size_t bad1 = 0;
  double worst_sym = 0.0, worst_tri = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = test::random_mixture_1d(g, rng);
    const auto b = test::random_mixture_1d(g, rng);
    const auto c = test::random_mixture_1d(g, rng);
    const double ab = wasserstein2_1d(a, b), ba = wasserstein2_1d(b, a);
    const double tri = wasserstein2_1d(a, c) - ab - wasserstein2_1d(b, c);
    worst_sym = std::max(worst_sym, std::fabs(ab - ba));
    worst_tri = std::max(worst_tri, tri);
    if (std::fabs(ab - ba) > 1e-6 || tri > 1e-6 || wasserstein2_1d(a, a) > 1e-6 || !(ab > 0.0)) ++bad1;
  }
  const AngleSet angles(30);
  std::size_t bad2 = 0;
  double worst_sym2 = 0.0, worst_tri2 = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = radon_forward(test::random_mixture_2d(24, rng), angles);
    const auto b = radon_forward(test::random_mixture_2d(24, rng), angles);
    const auto c = radon_forward(test::random_mixture_2d(24, rng), angles);
    const double ab = std::sqrt(sw_squared(a, b)), ba = std::sqrt(sw_squared(b, a));
    const double tri = std::sqrt(sw_squared(a, c)) - ab - std::sqrt(sw_squared(b, c));
    worst_sym2 = std::max(worst_sym2, std::fabs(ab - ba));
    worst_tri2 = std::max(worst_tri2, tri);
    if (std::fabs(ab - ba) > 1e-6 || tri > 1e-6 || std::sqrt(sw_squared(a, a)) > 1e-6 || !(ab > 0.0)) ++bad2;
  }
  return {bad1 == 0 && bad2 == 0,
          "violations W2 " + std::to_string(bad1) + "/1000, SW " + std::to_string(bad2) +
              "/1000; max asymmetry " + fmt("%.1e", std::max(worst_sym, worst_sym2)) + ", max triangle excess " +
              fmt("%.1e", std::max(worst_tri, worst_tri2))};
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7007);
  std::vector<DiscreteDensity2D> set{test::two_bumps(128)};
  for (int i = 0; i < 2; ++i) set.push_back(test::random_mixture_2d(128, rng));
  const auto tpl = make_template(set, AngleSet(180));
  double worst2 = 0.0;
  for (const auto& d : set) worst2 = std::max(worst2, test::l1(phi_invert(phi_embed(d, tpl), tpl), d));

  const auto g = Grid1D::covering(-8.0, 8.0, 512);
  const auto t1 = test::gaussian_1d(g, 0.0, 1.5);
  double worst1 = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto d = test::random_mixture_1d(g, rng);
    worst1 = std::max(worst1, test::l1(psi_invert(psi_embed(d, t1), t1), d));
  }
  const double t = seconds_since(t0);
  return {worst2 <= 0.08 && worst1 <= 1e-2 && t < 60.0,
          "phi round trip max L1 " + fmt("%.4f", worst2) + " (128x128, 180 angles), psi round trip max L1 " +
              fmt("%.2e", worst1) + ", " + fmt("%.1f", t) + " s"};
}

Outcome criterion8() {
  TranslateBenchmark bench;  // 40 + 40, separation 20 px, spread 2 px
  const auto data = translate_benchmark(bench, 8008);
  const auto tpl = make_template(data.densities, AngleSet(180));
  const DatasetFeatures f(data.densities, tpl);
  const double scale = 1.0 / median_off_diagonal(f.sw_squared());
  KernelGroup group{"sw_gaussian", {}};
  for (double g : {0.1, 1.0, 10.0}) group.candidates.push_back(gram(f, KernelSpec{KernelKind::sw_gaussian, g * scale}));
  CvOptions opt;
  opt.folds = 5;
  opt.repeats = 20;
  opt.seed = 8;
  const auto cv = cross_validate(std::vector{group}, data.labels, opt);

  TranslateBenchmark clean = bench;
  clean.noise = 0.0;
  const auto noiseless = translate_benchmark(clean, 8008);
  const auto tpl2 = make_template(noiseless.densities, AngleSet(180));
  const DatasetFeatures f2(noiseless.densities, tpl2);
  const auto k = gram(f2, KernelSpec{KernelKind::sw_gaussian, 1.0 / median_off_diagonal(f2.sw_squared())}).entries;
  bool monotone = true;
  double best_inertia = 1e300;
  std::vector<int> best;
  for (std::uint64_t run = 0; run < 10; ++run) {
    const auto a = kernel_kmeans(k, 2, 1, run);
    for (std::size_t t = 1; t < a.inertia_trace.size(); ++t) monotone = monotone && a.inertia_trace[t] <= a.inertia_trace[t - 1];
    if (a.inertia < best_inertia) {
      best_inertia = a.inertia;
      best = a.labels;
    }
  }
  const auto chosen = kernel_kmeans(k, 2, 10, 0);
  const double v = v_measure(noiseless.labels, chosen.labels);
  return {cv[0].mean >= 0.95 && v == 1.0 && monotone && chosen.labels == best,
          "sw_gaussian CV accuracy " + fmt("%.2f", 100.0 * cv[0].mean) + "% +- " + fmt("%.2f", 100.0 * cv[0].stddev) +
              "% (5-fold x 20); k-means V-measure " + fmt("%.4f", v) + "; inertia traces monotone: " +
              (monotone ? "yes" : "no")};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).generic_string()] = s.str();
  }
  return files;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "swk");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream sink;
  auto* old = std::cerr.rdbuf(sink.rdbuf());
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cerr.rdbuf(old);
  return code;
}

Outcome criterion9() {
  const fs::path root = fs::temp_directory_path() / "swk_acceptance_determinism";
  fs::remove_all(root);
  std::mt19937_64 rng(9009);
  for (const char* cls : {"grass", "stone"}) {
    fs::create_directories(root / "images" / cls);
    for (int i = 0; i < 4; ++i) {
      write_pgm(root / "images" / cls / ("img" + std::to_string(i) + ".pgm"), test::random_texture(32, rng));
    }
  }
  const std::vector<std::string> small{"--seed", "9", "--angles", "30", "--set", "synthetic.grid=32", "--set",
                                       "synthetic.per_class=8", "--set", "synthetic.separation=10", "--set",
                                       "synthetic.spread=1.5"};
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
      {"distance", {}},
      {"pca", {"--set", "synthetic.kind=lattice"}},
      {"cluster", {}},
      {"classify", {"--set", "folds=4", "--set", "repeats=2"}},
      {"certify", {"--set", "trials=200"}},
      {"invert", {"--set", "invert.mode=axis", "--set", "steps=3"}},
      {"ingest", {"--set", "source=pgm", "--set", "data_dir=" + (root / "images").string(), "--levels", "16"}},
  };
  std::size_t identical = 0;
  std::string failures;
  for (const auto& [name, extra] : commands) {
    std::map<std::string, std::string> outputs[2];
    bool ok = true;
    for (int pass = 0; pass < 2; ++pass) {
      ::setenv("SWK_THREADS", pass == 0 ? "1" : "3", 1);
      const fs::path out = root / (name + std::to_string(pass));
      std::vector<std::string> args{name, "--out", out.string()};
      args.insert(args.end(), small.begin(), small.end());
      args.insert(args.end(), extra.begin(), extra.end());
      ok = ok && run_cli(args) == 0;
      outputs[pass] = snapshot(out);
    }
    ::unsetenv("SWK_THREADS");
    // The resolved-config copy records the output directory itself.
    outputs[0].erase("resolved_config.txt");
    outputs[1].erase("resolved_config.txt");
    if (ok && !outputs[0].empty() && outputs[0] == outputs[1]) {
      ++identical;
    } else {
      failures += " " + name;
    }
  }
  fs::remove_all(root);
  return {identical == commands.size(),
          std::to_string(identical) + "/" + std::to_string(commands.size()) +
              " commands byte-identical across reruns (1 vs 3 threads)" + (failures.empty() ? "" : "; differs:" + failures)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1D Gaussian closed form", criterion1},  {"embedding isometry", criterion2},
      {"translate geometry", criterion3},       {"PD certification", criterion4},
      {"CND certification", criterion5},        {"metric axioms", criterion6},
      {"invertibility", criterion7},            {"learning benchmark", criterion8},
      {"determinism", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
