#pragma once

#include <span>
#include <vector>

#include "swk/density.hpp"

namespace swk {

/// Monotone map sampled at the cell centers of its source grid.
struct TransportMap1D {
  Grid1D grid;
  std::vector<double> values;

  /// Linear interpolation between samples (clamped slope extension outside).
  double operator()(double x) const noexcept;
};

/// f = quantile_target o cdf_source at every source sample.
/// Throws std::domain_error("positivity violated") unless both densities are
/// strictly positive.
TransportMap1D transport_map(const DiscreteDensity1D& source, const DiscreteDensity1D& target);

/// Squared 2-Wasserstein distance from the source-side formula
///   W2^2 = integral (f(x) - x)^2 source(x) dx,
/// integrated exactly for piecewise-constant densities (f is piecewise linear
/// on every source cell, with breaks where the source CDF crosses target knots).
double wasserstein2_squared_1d(const Cdf1D& source, const Cdf1D& target);
double wasserstein2_1d(const DiscreteDensity1D& source, const DiscreteDensity1D& target);

/// Linear embedding relative to a template density.
///
/// Component k is (f - id) * sqrt(template) on template cell k, with f the map
/// template -> I. The magnitude is the cell RMS of (f - id), the sign that of
/// its cell mean, so the Riemann norm sum(v^2) * spacing reproduces W2(I,
/// template) exactly while pairwise differences approximate W2(I1, I2) to
/// O(spacing^2).
std::vector<double> psi_embed(const DiscreteDensity1D& density, const DiscreteDensity1D& templ);
std::vector<double> psi_embed(const Cdf1D& density, const Cdf1D& templ);

/// Riemann norm on a grid: sqrt(sum(v^2) * spacing).
double riemann_norm(std::span<const double> v, double spacing);

/// Recovers f = id + v / sqrt(template) at template samples and pushes the
/// template mass through it, spreading each cell uniformly over its image and
/// re-gridding by overlap. Throws std::domain_error("not a valid embedding
/// point") when the recovered map decreases.
DiscreteDensity1D psi_invert(std::span<const double> v, const DiscreteDensity1D& templ,
                             double epsilon = kDefaultEpsilon);

}  // namespace swk
