#include "swk/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swk {

namespace {

void require_positive(const DiscreteDensity1D& d) {
  if (!d.strictly_positive()) throw std::domain_error("positivity violated");
}

void require_positive(const Cdf1D& c) {
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!(c.width(k) > 0.0)) throw std::domain_error("positivity violated");
  }
}

// One piece of the monotone coupling: on the probability interval [s0, s1]
// the source position runs linearly x0 -> x1 and the target y0 -> y1.
struct Piece {
  std::size_t cell;
  double s0, s1;
  double x0, x1;
  double y0, y1;
};

// Walks the coupling cell by cell on the source side. Both position maps use
// the same left-edge formula, so identical CDFs give bitwise identical x and y.
template <class Visit>
void walk_coupling(const Cdf1D& src, const Cdf1D& tgt, Visit&& visit) {
  const Grid1D& gs = src.grid();
  const Grid1D& gt = tgt.grid();
  const std::size_t ns = gs.count;
  const std::size_t nt = gt.count;
  std::size_t j = 0;
  for (std::size_t k = 0; k < ns; ++k) {
    const double a0 = src.at_edge(k);
    const double a1 = src.at_edge(k + 1);
    const double wa = a1 - a0;
    if (!(wa > 0.0)) continue;
    const double xe = gs.edge(k);
    auto xpos = [&](double s) { return xe + ((s - a0) / wa) * gs.spacing; };
    double s = a0;
    while (true) {
      while (j + 1 < nt && tgt.at_edge(j + 1) <= s) ++j;
      const double b0 = tgt.at_edge(j);
      const double b1 = j + 1 < nt ? tgt.at_edge(j + 1) : 1.0;
      const double wb = b1 - b0;
      const double s_end = std::min(a1, b1);
      const double ye = gt.edge(j);
      auto ypos = [&](double t) { return wb > 0.0 ? ye + ((t - b0) / wb) * gt.spacing : ye; };
      visit(Piece{k, s, s_end, xpos(s), xpos(s_end), ypos(s), ypos(s_end)});
      if (s_end >= a1) break;
      s = s_end;
    }
  }
}

}  // namespace

double TransportMap1D::operator()(double x) const noexcept {
  const double u = (x - grid.origin) / grid.spacing;
  const auto last = static_cast<double>(grid.count - 1);
  const double c = std::clamp(std::floor(u), 0.0, last - 1.0);
  const auto k = static_cast<std::size_t>(c);
  const double a = u - c;
  return values[k] + a * (values[k + 1] - values[k]);
}

TransportMap1D transport_map(const DiscreteDensity1D& source, const DiscreteDensity1D& target) {
  require_positive(source);
  require_positive(target);
  const Cdf1D cs = cdf(source);
  const Cdf1D ct = cdf(target);
  TransportMap1D map{source.grid(), std::vector<double>(source.size())};
  for (std::size_t k = 0; k < source.size(); ++k) {
    const double p = cs.at_edge(k) + 0.5 * cs.width(k);
    map.values[k] = quantile(ct, std::clamp(p, 0.0, 1.0));
  }
  return map;
}

double wasserstein2_squared_1d(const Cdf1D& source, const Cdf1D& target) {
  require_positive(source);
  require_positive(target);
  double acc = 0.0;
  walk_coupling(source, target, [&](const Piece& p) {
    const double d0 = p.y0 - p.x0;
    const double d1 = p.y1 - p.x1;
    acc += (p.s1 - p.s0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
  });
  return acc;
}

double wasserstein2_1d(const DiscreteDensity1D& source, const DiscreteDensity1D& target) {
  require_positive(source);
  require_positive(target);
  return std::sqrt(wasserstein2_squared_1d(cdf(source), cdf(target)));
}

std::vector<double> psi_embed(const Cdf1D& density, const Cdf1D& templ) {
  require_positive(density);
  require_positive(templ);
  const std::size_t n = templ.size();
  std::vector<double> second(n, 0.0);
  std::vector<double> first(n, 0.0);
  walk_coupling(templ, density, [&](const Piece& p) {
    const double d0 = p.y0 - p.x0;
    const double d1 = p.y1 - p.x1;
    const double ds = p.s1 - p.s0;
    second[p.cell] += ds * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
    first[p.cell] += ds * 0.5 * (d0 + d1);
  });
  // v_k^2 * spacing equals the exact cell integral of (f - id)^2 * template.
  std::vector<double> v(n);
  const double inv_h = 1.0 / templ.grid().spacing;
  for (std::size_t k = 0; k < n; ++k) {
    const double magnitude = std::sqrt(second[k] * inv_h);
    v[k] = first[k] < 0.0 ? -magnitude : magnitude;
  }
  return v;
}

std::vector<double> psi_embed(const DiscreteDensity1D& density, const DiscreteDensity1D& templ) {
  require_positive(density);
  require_positive(templ);
  return psi_embed(cdf(density), cdf(templ));
}

double riemann_norm(std::span<const double> v, double spacing) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc * spacing);
}

DiscreteDensity1D psi_invert(std::span<const double> v, const DiscreteDensity1D& templ, double epsilon) {
  require_positive(templ);
  const Grid1D& g = templ.grid();
  const std::size_t n = g.count;
  if (v.size() != n) throw std::invalid_argument("embedding length does not match template grid");

  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = g.position(k) + v[k] / std::sqrt(templ[k]);
  const double slack = 1e-12 * g.spacing;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!std::isfinite(f[k]) || f[k + 1] < f[k] - slack) throw std::domain_error("not a valid embedding point");
  }

  // Images of the template cell edges.
  std::vector<double> edges(n + 1);
  edges[0] = f[0] - 0.5 * (f[1] - f[0]);
  for (std::size_t k = 1; k < n; ++k) edges[k] = 0.5 * (f[k - 1] + f[k]);
  edges[n] = f[n - 1] + 0.5 * (f[n - 1] - f[n - 2]);

  std::vector<double> mass(n, 0.0);
  const auto top = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = templ.cell_mass(k);
    const double lo = (edges[k] - g.lower()) / g.spacing;
    const double hi = std::max(lo, (edges[k + 1] - g.lower()) / g.spacing);
    const double len = hi - lo;
    if (len <= 1e-12) {
      const double c = std::clamp(std::floor(lo), 0.0, top - 1.0);
      mass[static_cast<std::size_t>(c)] += m;
      continue;
    }
    if (lo < 0.0) mass[0] += m * (std::min(hi, 0.0) - lo) / len;
    if (hi > top) mass[n - 1] += m * (hi - std::max(lo, top)) / len;
    const double a = std::max(lo, 0.0);
    const double b = std::min(hi, top);
    for (double c = std::floor(a); c < b; c += 1.0) {
      const double overlap = std::min(b, c + 1.0) - std::max(a, c);
      if (overlap > 0.0) mass[static_cast<std::size_t>(c)] += m * overlap / len;
    }
  }
  return normalize(g, mass, epsilon);
}

}  // namespace swk
