#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "swk/cli/commands.hpp"
#include "swk/cli/config.hpp"
#include "swk/io.hpp"

using namespace swk;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "swk");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream captured;
  auto* old = std::cerr.rdbuf(captured.rdbuf());
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cerr.rdbuf(old);
  return {code, captured.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::vector<std::vector<double>> read_csv_matrix(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(parse_real(cell));
    rows.push_back(row);
  }
  return rows;
}

// Small synthetic settings shared by the fast runs.
std::vector<std::string> small(const fs::path& out) {
  return {"--seed", "7", "--angles", "30", "--out", out.string(), "--set", "synthetic.grid=32", "--set",
          "synthetic.per_class=6", "--set", "synthetic.separation=10", "--set", "synthetic.spread=1"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in("# comment\nseed = 3\nangles=20\n\nkernels=sw_gaussian,linear_phi\n");
  auto c = cli::Config::parse(in);
  c.set("out", "/tmp/swk_cfg");
  const auto e = cli::resolve(c, "cluster");
  CHECK(e.seed == 3u);
  CHECK(e.angles == 20);
  CHECK(e.kernels.size() == 2);
  CHECK(e.resolved.at("folds") == "5");

  std::istringstream broken("no equals sign\n");
  CHECK_THROWS_AS(cli::Config::parse(broken), cli::ConfigError);

  cli::Config unknown;
  unknown.set("out", "/tmp/x");
  unknown.set("seed", "1");
  unknown.set("anglez", "3");
  CHECK_THROWS_AS(cli::resolve(unknown, "distance"), cli::ConfigError);

  cli::Config no_seed;
  no_seed.set("out", "/tmp/x");
  CHECK_THROWS_AS(cli::resolve(no_seed, "classify"), cli::ConfigError);

  cli::Config bad_gamma;
  bad_gamma.set("out", "/tmp/x");
  bad_gamma.set("seed", "1");
  bad_gamma.set("gammas", "1,-2");
  CHECK_THROWS_AS(cli::resolve(bad_gamma, "classify"), cli::ConfigError);
}

TEST_CASE("configuration errors exit with 2") {
  TempDir dir("swk_cli_errors");
  CHECK(invoke({"distance", "--out", dir.path.string()}).code == cli::kExitConfig);
  const auto r = invoke({"classify", "--out", dir.path.string(), "--set", "folds=1", "--seed", "1"});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("folds") != std::string::npos);
  CHECK(invoke({"bogus"}).code == cli::kExitConfig);
  CHECK(invoke({"pca", "--config", "/nonexistent.cfg", "--out", dir.path.string()}).code == cli::kExitConfig);
  CHECK(invoke({"distance", "--out", dir.path.string(), "--set", "source=densities", "--set",
                "data_dir=/nonexistent"}).code == cli::kExitConfig);
}

TEST_CASE("distance between density files") {
  TempDir dir("swk_cli_distance");
  const fs::path data = dir.path / "data";
  fs::create_directories(data);
  const std::size_t n = 48;
  const double pixel = 0.125;
  const auto blob = gaussian_blob(n, 6.0);
  const auto base = normalize(n, n, pixel, blob.values());
  save_density(data / "a.csv", base);
  save_density(data / "b.csv", base);
  save_density(data / "c.csv", shift_density(base, 8, 0));

  const fs::path out = dir.path / "out";
  const auto r = invoke({"distance", "--out", out.string(), "--set", "source=densities", "--set",
                         "data_dir=" + data.string()});
  REQUIRE(r.code == 0);
  const auto m = read_csv_matrix(out / "distances.csv");
  REQUIRE(m.size() == 3);
  CHECK(m[0][1] == 0.0);
  CHECK(m[1][0] == 0.0);
  CHECK(m[0][0] == 0.0);
  CHECK(m[0][2] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));
  CHECK(m[2][0] == m[0][2]);
  CHECK(fs::exists(out / "resolved_config.txt"));
  CHECK(slurp(out / "items.csv").find("c.csv") != std::string::npos);

  save_density(data / "d.csv", gaussian_blob(32, 4.0));
  const auto bad = invoke({"distance", "--out", out.string(), "--set", "source=densities", "--set",
                           "data_dir=" + data.string()});
  CHECK(bad.code == cli::kExitConfig);
  CHECK(bad.err.find("a.csv") != std::string::npos);
  CHECK(bad.err.find("d.csv") != std::string::npos);
}

TEST_CASE("pca on two points") {
  TempDir dir("swk_cli_pca2");
  const fs::path data = dir.path / "data";
  fs::create_directories(data);
  const auto base = gaussian_blob(32, 3.0);
  save_density(data / "a.csv", base);
  save_density(data / "b.csv", shift_density(base, 3, 1));
  const fs::path out = dir.path / "out";
  REQUIRE(invoke({"pca", "--out", out.string(), "--angles", "30", "--set", "source=densities", "--set",
                  "data_dir=" + data.string()}).code == 0);
  const std::string cpv = slurp(out / "cpv.csv");
  CHECK(cpv.find("linear_phi,1,100\n") != std::string::npos);
}

TEST_CASE("pca on the translate lattice") {
  TempDir dir("swk_cli_pca");
  const fs::path out = dir.path / "out";
  REQUIRE(invoke({"pca", "--seed", "1", "--angles", "60", "--out", out.string(), "--set", "synthetic.grid=40"}).code == 0);
  std::ifstream in(out / "cpv.csv");
  std::string line;
  double phi2 = 0.0, raw2 = 0.0;
  while (std::getline(in, line)) {
    if (line.rfind("linear_phi,2,", 0) == 0) phi2 = parse_real(line.substr(13));
    if (line.rfind("euclid_linear,2,", 0) == 0) raw2 = parse_real(line.substr(16));
  }
  CHECK(phi2 >= 99.0);
  CHECK(raw2 < 99.0);
}

TEST_CASE("cluster") {
  TempDir dir("swk_cli_cluster");
  const fs::path out = dir.path / "out";
  REQUIRE(invoke(concat({"cluster", "--set", "synthetic.noise=0"}, small(out))).code == 0);
  const auto j = read_json(out / "cluster.json");
  CHECK(j["v_measure"].get<double>() == doctest::Approx(1.0));
  CHECK(j["inertia_monotone"].get<bool>());

  const fs::path one = dir.path / "one";
  REQUIRE(invoke(concat({"cluster", "--set", "clusters=1"}, small(one))).code == 0);
  CHECK(read_json(one / "cluster.json")["v_measure"].get<double>() == doctest::Approx(0.0));
}

TEST_CASE("classify") {
  TempDir dir("swk_cli_classify");
  const fs::path out = dir.path / "out";
  REQUIRE(invoke(concat({"classify", "--set", "folds=3"}, small(out))).code == 0);
  const std::string summary = slurp(out / "summary.csv");
  for (const char* k : {"euclid_linear", "euclid_rbf", "sw_gaussian", "sw_poly"}) {
    CHECK(summary.find(std::string(k) + ",") != std::string::npos);
  }
  const auto rows = slurp(out / "accuracy.csv");
  CHECK(rows.rfind("kernel,repeat,fold,accuracy,gamma,degree,offset,C\n", 0) == 0);
  CHECK(summary.find("sw_gaussian,1,") != std::string::npos);

  const fs::path shuffled = dir.path / "shuffled";
  REQUIRE(invoke({"classify", "--seed", "11", "--angles", "20", "--out", shuffled.string(), "--set",
                  "shuffle_labels=true", "--set", "kernels=sw_gaussian", "--set", "synthetic.grid=32", "--set",
                  "synthetic.per_class=20", "--set", "synthetic.separation=10", "--set", "synthetic.spread=1",
                  "--set", "repeats=3"}).code == 0);
  std::ifstream in(shuffled / "summary.csv");
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  const double mean = parse_real(line.substr(12, line.find(',', 12) - 12));
  // 120 held-out predictions at chance: 0.5 +- 3 * 0.046.
  CHECK(mean > 0.36);
  CHECK(mean < 0.64);
}

TEST_CASE("certify") {
  TempDir dir("swk_cli_certify");
  const fs::path out = dir.path / "out";
  REQUIRE(invoke(concat({"certify", "--set", "trials=200"}, small(out))).code == 0);
  const auto j = read_json(out / "certify.json");
  CHECK(j["identity"]["pass"].get<bool>());
  CHECK(j["kernels"].size() == 5 + 6);
  for (const auto& k : j["kernels"]) CHECK(k["pass"].get<bool>());
  CHECK(j["cnd_sw_squared"]["pass"].get<bool>());
  CHECK_FALSE(j["negative_control"]["pass"].get<bool>());
  CHECK(j["all_expected"].get<bool>());
}

TEST_CASE("invert") {
  TempDir dir("swk_cli_invert");
  const fs::path zero = dir.path / "zero";
  REQUIRE(invoke(concat({"invert", "--set", "invert.mode=zero"}, small(zero))).code == 0);
  // Coarse setting: 32x32 pixels and 30 angles leave visible back-projection streaks.
  CHECK(read_json(zero / "invert_report.json")["l1_to_template"].get<double>() <= 0.2);
  CHECK(fs::exists(zero / "zero.csv"));

  const fs::path axis = dir.path / "axis";
  REQUIRE(invoke(concat({"invert", "--set", "invert.mode=axis", "--set", "steps=3"}, small(axis))).code == 0);
  const auto steps = read_json(axis / "invert_report.json")["axis"];
  REQUIRE(steps.size() == 3);
  CHECK(steps[1]["ok"].get<bool>());
  CHECK(fs::exists(axis / "axis" / "step1.csv"));

  // A phi file whose map at angle 2 runs backwards.
  const auto base = gaussian_blob(32, 2.0);
  const Template tpl(base, AngleSet(30));
  const auto& grid = tpl.sliced().t_grid();
  std::vector<double> v(30 * grid.count, 0.0);
  for (std::size_t k = 0; k < grid.count; ++k) v[2 * grid.count + k] = -5.0 * grid.position(k);
  {
    std::ofstream f(dir.path / "bad_phi.csv");
    write_phi(f, FeatureVector(tpl.angles(), grid, v));
  }
  const fs::path bad = dir.path / "bad";
  const auto r = invoke(concat({"invert", "--set", "invert.mode=file", "--set",
                                "invert.phi=" + (dir.path / "bad_phi.csv").string()},
                               small(bad)));
  CHECK(r.code == cli::kExitNumerical);
  const auto report = read_json(bad / "invert_report.json");
  CHECK_FALSE(report["ok"].get<bool>());
  CHECK(report["error"].get<std::string>().find("angle index 2") != std::string::npos);
}

TEST_CASE("ingest and pgm sources") {
  TempDir dir("swk_cli_ingest");
  std::mt19937_64 rng(4);
  for (const char* cls : {"a", "b"}) {
    fs::create_directories(dir.path / "img" / cls);
    for (int i = 0; i < 3; ++i) write_pgm(dir.path / "img" / cls / ("t" + std::to_string(i) + ".pgm"), test::random_texture(24, rng));
  }
  std::ofstream(dir.path / "img" / "b" / "broken.pgm") << "P5\n";
  const fs::path out = dir.path / "out";
  const auto r = invoke({"ingest", "--levels", "16", "--out", out.string(), "--set", "source=pgm", "--set",
                         "data_dir=" + (dir.path / "img").string()});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("broken.pgm") != std::string::npos);
  const auto d = load_density_2d(out / "densities" / "b" / "t1.csv");
  CHECK(d.rows() == 16);
  const auto m = read_json(out / "manifest.json");
  CHECK(m["items"].size() == 6);
  CHECK(m["skipped"].size() == 1);

  const fs::path dist = dir.path / "dist";
  REQUIRE(invoke({"distance", "--angles", "20", "--levels", "16", "--out", dist.string(), "--set", "source=pgm",
                  "--set", "data_dir=" + (dir.path / "img").string()}).code == 0);
  CHECK(read_csv_matrix(dist / "distances.csv").size() == 6);
}
