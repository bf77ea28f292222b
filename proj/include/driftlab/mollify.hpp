#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "driftlab/drift.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/field.hpp"
#include "driftlab/grid.hpp"

namespace driftlab {

/// Smoothing scale for the compactly supported bump kernel
/// exp(-1/(1-|z|^2)) on the open unit space-time ball, scaled to radius
/// `scale` and normalized to unit discrete mass.
struct MollifierConfig {
  double scale = 0.0;
};

namespace detail {

struct KernelTap {
  long dx = 0;
  long dy = 0;
  long dk = 0;  ///< time-node offset
  double weight = 0.0;
};

inline double bump(double r2) {
  if (r2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r2));
}

/// Offsets live on the grid lattice (and time-node lattice), so that every
/// shifted sample lands exactly on another node or outside the domain.
inline std::vector<KernelTap> kernel_taps(const SpaceGrid& g, const TimeGrid& tg,
                                          double eps, bool in_time) {
  std::vector<KernelTap> taps;
  const long mx = static_cast<long>(std::floor(eps / g.hx));
  const long my = g.domain.kind == DomainKind::rectangle
                      ? static_cast<long>(std::floor(eps / g.hy))
                      : 0;
  const long mk = in_time ? static_cast<long>(std::floor(eps / tg.dt())) : 0;
  double total = 0.0;
  for (long dk = -mk; dk <= mk; ++dk)
    for (long dy = -my; dy <= my; ++dy)
      for (long dx = -mx; dx <= mx; ++dx) {
        const double zx = dx * g.hx / eps;
        const double zy = dy * g.hy / eps;
        const double zt = in_time ? dk * tg.dt() / eps : 0.0;
        const double w = bump(zx * zx + zy * zy + zt * zt);
        if (w > 0.0) {
          taps.push_back({dx, dy, dk, w});
          total += w;
        }
      }
  for (auto& t : taps) t.weight /= total;
  return taps;
}

/// Per-axis drift samples on the lattice with zero extension outside the
/// domain. Lattice index (ix, iy) may step outside [0, nx) x [0, ny).
inline std::array<double, 2> lattice_drift(const DriftSpec& b, const SpaceGrid& g,
                                           long ix, long iy, double t) {
  const long nx = static_cast<long>(g.nx);
  const long ny = g.domain.kind == DomainKind::rectangle
                      ? static_cast<long>(g.ny)
                      : 1;
  if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return {0.0, 0.0};
  const std::size_t j = static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
                        static_cast<std::size_t>(ix);
  if (b.kind == DriftSpec::Kind::sampled) {
    const SampledDrift& s = *b.data;
    const int k = s.time.nearest_node(t);
    std::array<double, 2> out{0.0, 0.0};
    for (int axis = 0; axis < s.components; ++axis)
      out[axis] = s.values[k][static_cast<std::size_t>(axis) * g.size() + j];
    return out;
  }
  return eval_drift(b, g.nodes[j], t);
}

}  // namespace detail

/**
 * Space-time convolution of a drift with the bump kernel, sampled back on
 * the grid. The drift is extended by zero outside the domain, so values are
 * only faithful at nodes farther than `scale` from the boundary; that is the
 * region on which the smoothed field keeps a nonpositive divergence when the
 * original field has one. Time is clamp-extended to [0, T], which leaves
 * autonomous drifts exactly autonomous.
 *
 * Supported on interval and rectangle grids, where lattice shifts map nodes
 * to nodes and the convolution is exact for affine fields away from the
 * boundary. Radial-reduction grids are rejected.
 */
inline DriftSpec mollify(const DriftSpec& spec, const MollifierConfig& cfg,
                         const SpaceGrid& g, const TimeGrid& tg) {
  if (!(cfg.scale > 0.0)) throw ConfigError("mollifier scale must be positive");
  if (g.domain.kind == DomainKind::radial_ball)
    throw ConfigError("mollification requires a lattice grid (interval or rectangle)");
  if (cfg.scale >= g.domain.inradius())
    throw ConfigError("mollifier scale leaves no interior subdomain");
  if (spec.kind == DriftSpec::Kind::sampled) {
    const SampledDrift& s = *spec.data;
    if (s.grid->size() != g.size() || s.grid->domain.kind != g.domain.kind ||
        std::abs(s.grid->hx - g.hx) > 1e-12 * g.hx)
      throw ConfigError("sampled drift lives on a different grid");
  }

  const bool in_time = spec.time_dependent();
  const auto taps = detail::kernel_taps(g, tg, cfg.scale, in_time);
  const int components = g.domain.kind == DomainKind::rectangle ? 2 : 1;
  const long nx = static_cast<long>(g.nx);

  std::vector<std::vector<double>> values(tg.nodes());
  for (int k = 0; k <= tg.steps; ++k) {
    values[k].assign(static_cast<std::size_t>(components) * g.size(), 0.0);
    const double t = tg.node(k);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const long ix = static_cast<long>(j) % nx;
      const long iy = static_cast<long>(j) / nx;
      double acc[2] = {0.0, 0.0};
      for (const auto& tap : taps) {
        const double ts = std::clamp(t + tap.dk * tg.dt(), 0.0, tg.T);
        const auto v =
            detail::lattice_drift(spec, g, ix + tap.dx, iy + tap.dy, ts);
        acc[0] += tap.weight * v[0];
        acc[1] += tap.weight * v[1];
      }
      for (int axis = 0; axis < components; ++axis)
        values[k][static_cast<std::size_t>(axis) * g.size() + j] = acc[axis];
    }
  }

  auto out = std::make_shared<SampledDrift>();
  out->grid = std::make_shared<SpaceGrid>(g);
  out->time = tg;
  out->components = components;
  out->values = std::move(values);
  return DriftSpec::sampled(std::move(out));
}

/// Space-time L2 distance between two drifts over (0,T), using per-axis
/// advection coefficients at the grid nodes and trapezoid weights in time.
inline double drift_l2_distance(const DriftSpec& a, const DriftSpec& b,
                                const SpaceGrid& g, const TimeGrid& tg) {
  const double dt = tg.dt();
  double total = 0.0;
  for (int k = 0; k <= tg.steps; ++k) {
    const double t = tg.node(k);
    const auto ca = advection_coefficients(a, g, t);
    const auto cb = advection_coefficients(b, g, t);
    if (ca.size() != cb.size())
      throw ContractViolation("drift component counts differ");
    double slice = 0.0;
    for (std::size_t axis = 0; axis < ca.size(); ++axis)
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double d = ca[axis][j] - cb[axis][j];
        slice += g.weights[j] * d * d;
      }
    total += (k == 0 || k == tg.steps ? 0.5 : 1.0) * dt * slice;
  }
  return std::sqrt(total);
}

}  // namespace driftlab
