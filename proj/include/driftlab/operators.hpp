#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "driftlab/banded.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/grid.hpp"

namespace driftlab {

enum class AdvectionScheme { upwind, centered };

namespace detail {

/// Visit every diffusion face of the grid. For an interior face the callback
/// receives both cell indices and the transmissibility tau (face measure over
/// center distance); for a Dirichlet face the second index is npos and tau
/// uses the half-cell distance. Ball grids have no face at the origin: the
/// face measure vanishes there (n >= 2), which encodes the symmetry condition.
inline void for_each_face(
    const SpaceGrid& g,
    const std::function<void(std::size_t, std::size_t, double)>& visit) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  switch (g.domain.kind) {
    case DomainKind::interval: {
      const double tau = 1.0 / g.hx;
      for (std::size_t j = 0; j + 1 < g.size(); ++j) visit(j, j + 1, tau);
      visit(0, npos, 2.0 / g.hx);
      visit(g.size() - 1, npos, 2.0 / g.hx);
      break;
    }
    case DomainKind::rectangle: {
      const std::size_t nx = g.nx, ny = g.ny;
      const double tx = g.hy / g.hx, ty = g.hx / g.hy;
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
          const std::size_t c = j * nx + i;
          if (i + 1 < nx) visit(c, c + 1, tx);
          if (j + 1 < ny) visit(c, c + nx, ty);
          if (i == 0) visit(c, npos, 2.0 * tx);
          if (i + 1 == nx) visit(c, npos, 2.0 * tx);
          if (j == 0) visit(c, npos, 2.0 * ty);
          if (j + 1 == ny) visit(c, npos, 2.0 * ty);
        }
      break;
    }
    case DomainKind::radial_ball: {
      const int n = g.domain.dim;
      const double omega = Domain::unit_sphere_area(n);
      for (std::size_t j = 0; j + 1 < g.size(); ++j) {
        const double rf = (j + 1) * g.hx;
        visit(j, j + 1, omega * std::pow(rf, n - 1) / g.hx);
      }
      const double rb = g.domain.hi[0];
      visit(g.size() - 1, npos,
            omega * std::pow(rb, n - 1) / (0.5 * g.hx));
      break;
    }
  }
}

inline std::size_t grid_bandwidth(const SpaceGrid& g) {
  return g.domain.kind == DomainKind::rectangle ? static_cast<std::size_t>(g.nx)
                                                : 1;
}

}  // namespace detail

/// Symmetric positive form of the Dirichlet Laplacian: A such that
/// (A u)_j = w_j (-Delta_h u)_j. Assembled once per grid.
inline BandedMatrix assemble_diffusion_form(const SpaceGrid& g) {
  BandedMatrix a(g.size(), detail::grid_bandwidth(g));
  detail::for_each_face(g, [&](std::size_t i, std::size_t j, double tau) {
    if (j == static_cast<std::size_t>(-1)) {
      a.add(i, i, tau);
    } else {
      a.add(i, i, tau);
      a.add(j, j, tau);
      a.add(i, j, -tau);
      a.add(j, i, -tau);
    }
  });
  return a;
}

/// Energy of the discrete gradient, D(u,v) = sum over faces of
/// tau (u_i - u_j)(v_i - v_j), boundary faces pairing against zero. This is
/// exactly <-Delta_h u, v> in the weighted inner product, so energy bookkeeping
/// downstream is internally consistent with the solver stencil.
inline double dirichlet_form(const SpaceGrid& g, std::span<const double> u,
                             std::span<const double> v) {
  if (u.size() != g.size() || v.size() != g.size())
    throw ContractViolation("dirichlet_form: field length does not match grid");
  double acc = 0.0;
  detail::for_each_face(g, [&](std::size_t i, std::size_t j, double tau) {
    if (j == static_cast<std::size_t>(-1)) {
      acc += tau * u[i] * v[i];
    } else {
      acc += tau * (u[i] - u[j]) * (v[i] - v[j]);
    }
  });
  return acc;
}

/**
 * First-order advection operator L_adv for nodal velocity data, one
 * coefficient array per axis (ball grids use the radial component). Upwind
 * differencing keeps the step matrix an M-matrix: positive diagonal,
 * non-positive off-diagonals. Inflow from the Dirichlet boundary carries the
 * value zero, so the would-be neighbour coefficient lands nowhere and shows
 * up as a row-sum surplus instead.
 *
 * The centered variant second-order but sign-indefinite; it exists to
 * demonstrate how the discrete maximum principle fails without upwinding.
 */
inline BandedMatrix assemble_advection(
    const SpaceGrid& g, std::span<const std::vector<double>> axis_coef,
    AdvectionScheme scheme = AdvectionScheme::upwind) {
  const std::size_t expected_axes = g.domain.kind == DomainKind::rectangle ? 2 : 1;
  if (axis_coef.size() != expected_axes)
    throw ContractViolation("assemble_advection: wrong number of axes");
  for (const auto& c : axis_coef)
    if (c.size() != g.size())
      throw ContractViolation("assemble_advection: coefficient length mismatch");

  BandedMatrix l(g.size(), detail::grid_bandwidth(g));
  const bool ball = g.domain.kind == DomainKind::radial_ball;

  auto couple = [&](std::size_t c, double a, double h, std::size_t lo,
                    std::size_t hi, bool lo_is_origin) {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    if (scheme == AdvectionScheme::centered) {
      // (a/2h)(u_{+} - u_{-}); missing neighbours hold the boundary value 0,
      // except the ball origin where symmetry reflects the cell value.
      const double c2 = a / (2.0 * h);
      if (hi != npos) l.add(c, hi, c2);
      if (lo != npos)
        l.add(c, lo, -c2);
      else if (lo_is_origin)
        l.add(c, c, -c2);
      return;
    }
    if (a > 0.0) {
      if (lo != npos) {
        l.add(c, c, a / h);
        l.add(c, lo, -a / h);
      } else if (!lo_is_origin) {
        l.add(c, c, a / h);  // upwind value is the boundary zero
      }
      // at the origin the reflected value equals the cell value: no term
    } else if (a < 0.0) {
      l.add(c, c, -a / h);
      if (hi != npos) l.add(c, hi, a / h);
    }
  };

  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  if (g.domain.kind == DomainKind::rectangle) {
    const std::size_t nx = g.nx, ny = g.ny;
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t c = j * nx + i;
        couple(c, axis_coef[0][c], g.hx, i > 0 ? c - 1 : npos,
               i + 1 < nx ? c + 1 : npos, false);
        couple(c, axis_coef[1][c], g.hy, j > 0 ? c - nx : npos,
               j + 1 < ny ? c + nx : npos, false);
      }
  } else {
    for (std::size_t j = 0; j < g.size(); ++j)
      couple(j, axis_coef[0][j], g.hx, j > 0 ? j - 1 : npos,
             j + 1 < g.size() ? j + 1 : npos, ball);
  }
  return l;
}

/// Row sums of a banded operator (deficit against zero for an advection
/// operator; subtract one externally for a step matrix).
inline std::vector<double> row_sums(const BandedMatrix& b) {
  std::vector<double> s(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::size_t j0 = i > b.bandwidth() ? i - b.bandwidth() : 0;
    const std::size_t j1 = std::min(b.size() - 1, i + b.bandwidth());
    for (std::size_t j = j0; j <= j1; ++j) s[i] += b.get(i, j);
  }
  return s;
}

/// Weighted column sums (sum_i w_i B_ik) / w_k. For the upwind advection
/// operator this is a one-sided divergence of the velocity field taken
/// against the scheme itself, so its sign certifies the L1 contraction of
/// the corresponding step matrix.
inline std::vector<double> weighted_column_sums(const BandedMatrix& b,
                                                const SpaceGrid& g) {
  if (b.size() != g.size())
    throw ContractViolation("weighted_column_sums: size mismatch");
  std::vector<double> s(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::size_t j0 = i > b.bandwidth() ? i - b.bandwidth() : 0;
    const std::size_t j1 = std::min(b.size() - 1, i + b.bandwidth());
    for (std::size_t j = j0; j <= j1; ++j) s[j] += g.weights[i] * b.get(i, j);
  }
  for (std::size_t j = 0; j < b.size(); ++j) s[j] /= g.weights[j];
  return s;
}

}  // namespace driftlab
