#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "swk/density.hpp"
#include "swk/kernels.hpp"
#include "swk/radon.hpp"
#include "swk/sliced.hpp"

// CSV formats. Each file starts with one tagged header line of key=value
// fields, followed by comma-separated rows. Numbers are written in shortest
// round-trip form and parsed without the C locale.
//
//   1D density   # grid origin=<r> spacing=<r>            one value per line
//   2D density   # grid rows=<n> cols=<n> pixel=<r>       rows x cols
//   sinogram     # sinogram L=<n> T=<n> t_origin=<r> t_spacing=<r>
//   embedding    # phi L=<n> T=<n> t_origin=<r> t_spacing=<r>
//   gram         # gram kind=<k> gamma=<r> degree=<n> offset=<n> min_eig=<r>

namespace swk {

std::string format_real(double v);
/// Whole-string parse; throws std::invalid_argument.
double parse_real(std::string_view s);
long long parse_integer(std::string_view s);

/// Header line "# <tag> k=v ..." split into its fields. Throws when the tag differs.
std::map<std::string, std::string> parse_header(std::string_view line, std::string_view tag);

/// Raw density files are normalized on read with the given epsilon.
DiscreteDensity1D read_density_1d(std::istream& in, double epsilon = kDefaultEpsilon);
DiscreteDensity2D read_density_2d(std::istream& in, double epsilon = kDefaultEpsilon);
void write_density(std::ostream& out, const DiscreteDensity1D& d);
void write_density(std::ostream& out, const DiscreteDensity2D& d);

SlicedRepresentation read_sinogram(std::istream& in, double epsilon = 0.0);
void write_sinogram(std::ostream& out, const SlicedRepresentation& s);

FeatureVector read_phi(std::istream& in);
void write_phi(std::ostream& out, const FeatureVector& v);

GramMatrix read_gram(std::istream& in);
void write_gram(std::ostream& out, const GramMatrix& g);

/// Plain matrix, no header.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);

DiscreteDensity2D load_density_2d(const std::filesystem::path& path, double epsilon = kDefaultEpsilon);
void save_density(const std::filesystem::path& path, const DiscreteDensity2D& d);

}  // namespace swk
