#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "driftlab/errors.hpp"

namespace driftlab {

enum class DomainKind { interval, rectangle, radial_ball };

/**
 * Computational domain. Three shapes are supported:
 *  - interval (a,b) in one dimension,
 *  - axis-aligned rectangle in two dimensions,
 *  - ball of given radius in R^n, discretized in the radial variable
 *    (all fields and drifts on it are radially symmetric).
 *
 * `dim` is the ambient space dimension n; for a ball it can exceed the
 * number of stored coordinates (the grid itself stays one-dimensional).
 */
struct Domain {
  DomainKind kind = DomainKind::interval;
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 0.0};

  static Domain interval(double a, double b) {
    if (!(b > a)) throw ConfigError("interval domain requires b > a");
    Domain d;
    d.kind = DomainKind::interval;
    d.dim = 1;
    d.lo = {a, 0.0};
    d.hi = {b, 0.0};
    return d;
  }

  static Domain rectangle(std::array<double, 2> a, std::array<double, 2> b) {
    if (!(b[0] > a[0]) || !(b[1] > a[1]))
      throw ConfigError("rectangle domain requires hi > lo on both axes");
    Domain d;
    d.kind = DomainKind::rectangle;
    d.dim = 2;
    d.lo = a;
    d.hi = b;
    return d;
  }

  static Domain ball(int n, double radius = 1.0) {
    if (n < 2) throw ConfigError("ball domain requires ambient dimension n >= 2");
    if (!(radius > 0.0)) throw ConfigError("ball domain requires radius > 0");
    Domain d;
    d.kind = DomainKind::radial_ball;
    d.dim = n;
    d.lo = {0.0, 0.0};
    d.hi = {radius, 0.0};
    return d;
  }

  /// Surface measure of the unit sphere S^{n-1}.
  static double unit_sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  }

  double volume() const {
    switch (kind) {
      case DomainKind::interval:
        return hi[0] - lo[0];
      case DomainKind::rectangle:
        return (hi[0] - lo[0]) * (hi[1] - lo[1]);
      case DomainKind::radial_ball:
        return unit_sphere_area(dim) / dim * std::pow(hi[0], dim);
    }
    return 0.0;
  }

  /// Radius of the largest ball centered in the domain; used to validate
  /// mollifier scales and subdomain margins.
  double inradius() const {
    switch (kind) {
      case DomainKind::interval:
        return 0.5 * (hi[0] - lo[0]);
      case DomainKind::rectangle:
        return 0.5 * std::min(hi[0] - lo[0], hi[1] - lo[1]);
      case DomainKind::radial_ball:
        return hi[0];
    }
    return 0.0;
  }
};

/**
 * Cell-centered grid over a Domain.
 *
 * Nodes sit at cell centers, so no node lies on the Dirichlet boundary;
 * the boundary condition enters operators through half-cell fluxes. The
 * quadrature weight of a node is the exact measure of its cell (for balls,
 * the exact shell volume), which keeps the discrete diffusion operator
 * symmetric with respect to the weighted inner product.
 *
 * Layout: interval and radial grids store the single coordinate in
 * nodes[j][0]; rectangle grids are row-major with x fastest.
 */
struct SpaceGrid {
  Domain domain;
  int nx = 0;  ///< cells along x (or radial cells)
  int ny = 0;  ///< cells along y, 0 unless rectangle
  double hx = 0.0;
  double hy = 0.0;
  std::vector<std::array<double, 2>> nodes;
  std::vector<double> weights;
  std::vector<std::uint8_t> boundary_mask;  ///< nodes on the closed boundary (none, cell-centered)

  std::size_t size() const { return nodes.size(); }

  double h() const { return ny > 0 ? std::max(hx, hy) : hx; }

  double volume() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  /// Distance from node j to the Dirichlet boundary.
  double boundary_distance(std::size_t j) const {
    const auto& p = nodes[j];
    switch (domain.kind) {
      case DomainKind::interval:
        return std::min(p[0] - domain.lo[0], domain.hi[0] - p[0]);
      case DomainKind::rectangle:
        return std::min(std::min(p[0] - domain.lo[0], domain.hi[0] - p[0]),
                        std::min(p[1] - domain.lo[1], domain.hi[1] - p[1]));
      case DomainKind::radial_ball:
        return domain.hi[0] - p[0];
    }
    return 0.0;
  }
};

inline SpaceGrid build_grid(const Domain& domain, int resolution) {
  if (resolution < 4)
    throw ConfigError("grid resolution must be at least 4, got " +
                      std::to_string(resolution));
  SpaceGrid g;
  g.domain = domain;
  switch (domain.kind) {
    case DomainKind::interval: {
      g.nx = resolution;
      g.hx = (domain.hi[0] - domain.lo[0]) / resolution;
      g.nodes.reserve(resolution);
      for (int j = 0; j < resolution; ++j) {
        g.nodes.push_back({domain.lo[0] + (j + 0.5) * g.hx, 0.0});
        g.weights.push_back(g.hx);
      }
      break;
    }
    case DomainKind::rectangle: {
      g.nx = resolution;
      g.ny = resolution;
      g.hx = (domain.hi[0] - domain.lo[0]) / resolution;
      g.hy = (domain.hi[1] - domain.lo[1]) / resolution;
      g.nodes.reserve(static_cast<std::size_t>(resolution) * resolution);
      for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i) {
          g.nodes.push_back({domain.lo[0] + (i + 0.5) * g.hx,
                             domain.lo[1] + (j + 0.5) * g.hy});
          g.weights.push_back(g.hx * g.hy);
        }
      break;
    }
    case DomainKind::radial_ball: {
      g.nx = resolution;
      g.hx = domain.hi[0] / resolution;
      const double omega = Domain::unit_sphere_area(domain.dim);
      const int n = domain.dim;
      for (int j = 0; j < resolution; ++j) {
        const double r_in = j * g.hx;
        const double r_out = (j + 1) * g.hx;
        g.nodes.push_back({(j + 0.5) * g.hx, 0.0});
        g.weights.push_back(omega / n *
                            (std::pow(r_out, n) - std::pow(r_in, n)));
      }
      break;
    }
  }
  g.boundary_mask.assign(g.size(), 0);
  return g;
}

/// Halve the spacing. Refined cell centers nest two-to-one into coarse
/// cells, which the resolution study in the uniqueness check relies on.
inline SpaceGrid refine(const SpaceGrid& g) {
  return build_grid(g.domain, 2 * g.nx);
}

inline double quadrature(const SpaceGrid& g, std::span<const double> values) {
  if (values.size() != g.size())
    throw ContractViolation("quadrature: field has " +
                            std::to_string(values.size()) + " values, grid has " +
                            std::to_string(g.size()) + " nodes");
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += g.weights[j] * values[j];
  return s;
}

/// Uniform partition of (0, T] into `steps` implicit Euler steps.
struct TimeGrid {
  double T = 1.0;
  int steps = 1;

  TimeGrid() = default;
  TimeGrid(double horizon, int k) : T(horizon), steps(k) {
    if (!(T > 0.0)) throw ConfigError("time horizon must be positive");
    if (steps < 1) throw ConfigError("time grid needs at least one step");
  }

  double dt() const { return T / steps; }
  double node(int k) const { return k * dt(); }
  int nodes() const { return steps + 1; }
  int nearest_node(double t) const {
    return std::clamp(static_cast<int>(std::lround(t / dt())), 0, steps);
  }
};

/**
 * Nested interior subdomains Omega_m paired with mollifier scales eps_m.
 * Level m keeps the nodes at distance > eps_m from the boundary, so a
 * convolution of radius eps_m evaluated there never sees extension values.
 */
struct SubdomainSchedule {
  std::vector<double> eps;  ///< strictly decreasing margins, one per level
};

inline std::vector<std::size_t> subdomain_grid(const SpaceGrid& g,
                                               const SubdomainSchedule& sched,
                                               std::size_t level) {
  if (level >= sched.eps.size())
    throw ContractViolation("subdomain level out of range");
  for (std::size_t m = 1; m < sched.eps.size(); ++m)
    if (!(sched.eps[m] < sched.eps[m - 1]))
      throw ConfigError("subdomain margins must decrease strictly");
  const double eps = sched.eps[level];
  if (eps >= g.domain.inradius())
    throw ConfigError("subdomain margin " + std::to_string(eps) +
                      " leaves no interior nodes (inradius " +
                      std::to_string(g.domain.inradius()) + ")");
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (g.boundary_distance(j) > eps) idx.push_back(j);
  if (idx.empty())
    throw ConfigError("subdomain margin admits no grid nodes at this resolution");
  return idx;
}

}  // namespace driftlab
