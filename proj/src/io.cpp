#include "swk/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace swk {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string first_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) return line;
  }
  throw std::invalid_argument("missing header line");
}

std::vector<double> parse_row(std::string_view line) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    row.push_back(parse_real(trim(line.substr(start, comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

std::vector<std::vector<double>> read_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    rows.push_back(parse_row(t));
  }
  return rows;
}

const std::string& field(const std::map<std::string, std::string>& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) throw std::invalid_argument("header field '" + key + "' missing");
  return it->second;
}

std::size_t count_field(const std::map<std::string, std::string>& h, const std::string& key) {
  const long long v = parse_integer(field(h, key));
  if (v < 0) throw std::invalid_argument("header field '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::vector<double> read_table(std::istream& in, std::size_t rows, std::size_t cols) {
  const auto table = read_rows(in);
  if (table.size() != rows) throw std::invalid_argument("expected " + std::to_string(rows) + " data rows");
  std::vector<double> flat;
  flat.reserve(rows * cols);
  for (const auto& r : table) {
    if (r.size() != cols) throw std::invalid_argument("expected " + std::to_string(cols) + " columns per row");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return flat;
}

void write_rows(std::ostream& out, std::span<const double> values, std::size_t cols) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << format_real(values[i]) << ((i + 1) % cols == 0 ? '\n' : ',');
  }
}

void write_slicing_header(std::ostream& out, std::string_view tag, std::size_t L, const Grid1D& g) {
  out << "# " << tag << " L=" << L << " T=" << g.count << " t_origin=" << format_real(g.origin)
      << " t_spacing=" << format_real(g.spacing) << '\n';
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

long long parse_integer(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::map<std::string, std::string> parse_header(std::string_view line, std::string_view tag) {
  std::istringstream words{std::string(trim(line))};
  std::string hash, name;
  words >> hash >> name;
  if (hash != "#" || name != tag) throw std::invalid_argument("expected a '# " + std::string(tag) + "' header");
  std::map<std::string, std::string> out;
  std::string kv;
  while (words >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("malformed header field '" + kv + "'");
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

DiscreteDensity1D read_density_1d(std::istream& in, double epsilon) {
  const auto h = parse_header(first_line(in), "grid");
  const double origin = parse_real(field(h, "origin"));
  const double spacing = parse_real(field(h, "spacing"));
  std::vector<double> raw;
  for (const auto& r : read_rows(in)) {
    if (r.size() != 1) throw std::invalid_argument("1D density files have one value per line");
    raw.push_back(r[0]);
  }
  return normalize(Grid1D(origin, spacing, raw.size()), raw, epsilon);
}

DiscreteDensity2D read_density_2d(std::istream& in, double epsilon) {
  const auto h = parse_header(first_line(in), "grid");
  const std::size_t rows = count_field(h, "rows");
  const std::size_t cols = count_field(h, "cols");
  const double pixel = parse_real(field(h, "pixel"));
  return normalize(rows, cols, pixel, read_table(in, rows, cols), epsilon);
}

void write_density(std::ostream& out, const DiscreteDensity1D& d) {
  out << "# grid origin=" << format_real(d.grid().origin) << " spacing=" << format_real(d.grid().spacing) << '\n';
  write_rows(out, d.values(), 1);
}

void write_density(std::ostream& out, const DiscreteDensity2D& d) {
  out << "# grid rows=" << d.rows() << " cols=" << d.cols() << " pixel=" << format_real(d.pixel_size()) << '\n';
  write_rows(out, d.values(), d.cols());
}

SlicedRepresentation read_sinogram(std::istream& in, double epsilon) {
  const auto h = parse_header(first_line(in), "sinogram");
  const std::size_t L = count_field(h, "L");
  const Grid1D grid(parse_real(field(h, "t_origin")), parse_real(field(h, "t_spacing")), count_field(h, "T"));
  const auto flat = read_table(in, L, grid.count);
  std::vector<DiscreteDensity1D> slices;
  slices.reserve(L);
  for (std::size_t l = 0; l < L; ++l) {
    slices.push_back(normalize(grid, std::span<const double>(flat).subspan(l * grid.count, grid.count), epsilon));
  }
  return SlicedRepresentation(AngleSet(L), grid, std::move(slices));
}

void write_sinogram(std::ostream& out, const SlicedRepresentation& s) {
  write_slicing_header(out, "sinogram", s.size(), s.t_grid());
  for (std::size_t l = 0; l < s.size(); ++l) write_rows(out, s.slice(l).values(), s.t_grid().count);
}

FeatureVector read_phi(std::istream& in) {
  const auto h = parse_header(first_line(in), "phi");
  const std::size_t L = count_field(h, "L");
  const Grid1D grid(parse_real(field(h, "t_origin")), parse_real(field(h, "t_spacing")), count_field(h, "T"));
  return FeatureVector(AngleSet(L), grid, read_table(in, L, grid.count));
}

void write_phi(std::ostream& out, const FeatureVector& v) {
  write_slicing_header(out, "phi", v.rows(), v.t_grid());
  write_rows(out, v.values(), v.cols());
}

GramMatrix read_gram(std::istream& in) {
  const auto h = parse_header(first_line(in), "gram");
  KernelSpec spec;
  spec.kind = parse_kernel_kind(field(h, "kind"));
  spec.gamma = parse_real(field(h, "gamma"));
  spec.degree = static_cast<int>(parse_integer(field(h, "degree")));
  spec.offset = static_cast<int>(parse_integer(field(h, "offset")));
  const auto table = read_rows(in);
  const std::size_t n = table.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (table[i].size() != n) throw std::invalid_argument("gram matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = table[i][j];
  }
  return make_gram(spec, std::move(m));
}

void write_gram(std::ostream& out, const GramMatrix& g) {
  out << "# gram kind=" << to_string(g.spec.kind) << " gamma=" << format_real(g.spec.gamma)
      << " degree=" << g.spec.degree << " offset=" << g.spec.offset << " min_eig=" << format_real(g.min_eigenvalue)
      << '\n';
  write_matrix(out, g.entries);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_real(m(i, j));
    out << '\n';
  }
}

DiscreteDensity2D load_density_2d(const std::filesystem::path& path, double epsilon) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_density_2d(in, epsilon);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void save_density(const std::filesystem::path& path, const DiscreteDensity2D& d) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_density(out, d);
}

}  // namespace swk
