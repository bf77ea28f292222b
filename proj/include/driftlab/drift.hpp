#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "driftlab/errors.hpp"
#include "driftlab/field.hpp"
#include "driftlab/grid.hpp"
#include "driftlab/operators.hpp"

namespace driftlab {

/// Building blocks of the singular drift family b0(r,t) x/|x|^2 whose
/// profile solves dtz - drrz + (r/t) drz = 0 with z(1,t) = 0. The algebra
/// below is exact; the unit tests pin it against the defining identity.
namespace shell {

inline double zeta(double r, double t) {
  if (!(t > 0.0)) throw ContractViolation("shell profile needs t > 0");
  return std::expm1((r - 1.0) / t);
}

inline double zeta_r(double r, double t) {
  return std::exp((r - 1.0) / t) / t;
}

inline double zeta_rr(double r, double t) {
  return std::exp((r - 1.0) / t) / (t * t);
}

inline double zeta_t(double r, double t) {
  return -std::exp((r - 1.0) / t) * (r - 1.0) / (t * t);
}

/// Radial multiplier: b0 = n - 1 - zeta / ((2/r)(zeta+1) - zeta).
/// Takes values in [n-1, n] for 0 < r <= 1, t > 0.
inline double b0(int n, double r, double t) {
  if (!(r > 0.0)) throw ContractViolation("shell profile needs r > 0");
  const double z = zeta(r, t);
  const double q = (2.0 / r) * (z + 1.0) - z;
  return n - 1.0 - z / q;
}

inline double b0_r(int n, double r, double t) {
  (void)n;
  const double z = zeta(r, t);
  const double zr = zeta_r(r, t);
  const double q = (2.0 / r) * (z + 1.0) - z;
  const double qr = (2.0 / r) * zr - 2.0 * (z + 1.0) / (r * r) - zr;
  return -(zr * q - z * qr) / (q * q);
}

}  // namespace shell

struct SampledDrift {
  GridPtr grid;
  TimeGrid time;
  int components = 1;
  /// values[k][axis * nodes + j] = component at time node k, grid node j
  std::vector<std::vector<double>> values;
};

/**
 * Drift catalog. Analytic kinds carry closed-form divergences; sampled data
 * is certified through the advection operator itself (column test), so the
 * certificate talks about exactly the matrix the stepper will use.
 *
 *   constant      b = c                      div = 0
 *   linear        b = c x                    div = c n
 *   radial_power  b = alpha x / |x|^2        div = alpha (n-2) / |x|^2
 *   nonuniqueness b = b0(|x|,t) x / |x|^2    div = b0'/r + (n-2) b0 / r^2
 *   instability   b = (n-2) x/|x|^2 - eps ln|x| x   (n = 2 only)
 *                                            div = -eps (2 ln|x| + 1)
 *   sampled       nodal data                 div = column test
 *
 * In two dimensions a nonzero radial flux through the origin additionally
 * deposits a point mass 2 pi b0(0+) delta_0; on a ball grid that lands in
 * the innermost cell as b0(0+) * 2 pi / w_0 and is included, otherwise the
 * certificate would miss exactly the sign violations these fields exist
 * to exhibit.
 */
struct DriftSpec {
  enum class Kind { zero, constant, linear, radial_power, nonuniqueness, instability, sampled };

  Kind kind = Kind::zero;
  int dim = 1;                      ///< ambient dimension the field lives in
  std::array<double, 2> vec{0, 0};  ///< constant kind
  double coef = 0.0;                ///< linear: c, radial_power: alpha, instability: eps
  std::shared_ptr<const SampledDrift> data;

  static DriftSpec zero(int n) { return {Kind::zero, n, {0, 0}, 0.0, nullptr}; }

  static DriftSpec constant(int n, std::array<double, 2> c) {
    return {Kind::constant, n, c, 0.0, nullptr};
  }

  static DriftSpec linear(int n, double c) {
    return {Kind::linear, n, {0, 0}, c, nullptr};
  }

  static DriftSpec radial_power(int n, double alpha) {
    if (n < 2) throw ConfigError("radial_power drift needs ambient n >= 2");
    return {Kind::radial_power, n, {0, 0}, alpha, nullptr};
  }

  static DriftSpec nonuniqueness(int n) {
    if (n < 2) throw ConfigError("nonuniqueness drift needs ambient n >= 2");
    return {Kind::nonuniqueness, n, {0, 0}, 0.0, nullptr};
  }

  static DriftSpec instability(double eps) {
    if (!(eps > 0.0)) throw ConfigError("instability drift needs eps > 0");
    return {Kind::instability, 2, {0, 0}, eps, nullptr};
  }

  static DriftSpec sampled(std::shared_ptr<const SampledDrift> d) {
    if (!d) throw ContractViolation("sampled drift needs data");
    DriftSpec s{Kind::sampled, d->grid->domain.dim, {0, 0}, 0.0, std::move(d)};
    return s;
  }

  bool time_dependent() const {
    return kind == Kind::nonuniqueness || kind == Kind::sampled;
  }

  std::string name() const {
    switch (kind) {
      case Kind::zero: return "zero";
      case Kind::constant: return "constant";
      case Kind::linear: return "linear";
      case Kind::radial_power: return "radial_power";
      case Kind::nonuniqueness: return "nonuniqueness";
      case Kind::instability: return "instability";
      case Kind::sampled: return "sampled";
    }
    return "?";
  }
};

/// Vector value of an analytic drift at a point (sampled kinds are nodal;
/// use advection_coefficients for those).
inline std::array<double, 2> eval_drift(const DriftSpec& b,
                                        const std::array<double, 2>& x,
                                        double t) {
  const double r = std::hypot(x[0], x[1]);
  switch (b.kind) {
    case DriftSpec::Kind::zero:
      return {0.0, 0.0};
    case DriftSpec::Kind::constant:
      return b.vec;
    case DriftSpec::Kind::linear:
      return {b.coef * x[0], b.coef * x[1]};
    case DriftSpec::Kind::radial_power: {
      if (r == 0.0) throw ContractViolation("radial_power drift is singular at 0");
      const double f = b.coef / (r * r);
      return {f * x[0], f * x[1]};
    }
    case DriftSpec::Kind::nonuniqueness: {
      if (r == 0.0) throw ContractViolation("nonuniqueness drift is singular at 0");
      const double f = shell::b0(b.dim, r, t) / (r * r);
      return {f * x[0], f * x[1]};
    }
    case DriftSpec::Kind::instability: {
      if (r == 0.0) throw ContractViolation("instability drift is singular at 0");
      const double f = (b.dim - 2.0) / (r * r) - b.coef * std::log(r);
      return {f * x[0], f * x[1]};
    }
    case DriftSpec::Kind::sampled:
      throw ContractViolation("sampled drifts have no off-node values");
  }
  return {0.0, 0.0};
}

/// Advection coefficients per axis on a grid (ball grids: the radial
/// component). Sampled data must live on the same grid.
inline std::vector<std::vector<double>> advection_coefficients(
    const DriftSpec& b, const SpaceGrid& g, double t) {
  const std::size_t axes = g.domain.kind == DomainKind::rectangle ? 2 : 1;

  if (b.kind == DriftSpec::Kind::sampled) {
    const auto& d = *b.data;
    if (d.grid->size() != g.size())
      throw ContractViolation("sampled drift lives on a different grid");
    const int k = d.time.nearest_node(t);
    if (static_cast<std::size_t>(d.components) != axes)
      throw ContractViolation("sampled drift has wrong component count");
    std::vector<std::vector<double>> out(axes, std::vector<double>(g.size()));
    for (std::size_t a = 0; a < axes; ++a)
      for (std::size_t j = 0; j < g.size(); ++j)
        out[a][j] = d.values[k][a * g.size() + j];
    return out;
  }

  if (g.domain.kind == DomainKind::radial_ball) {
    std::vector<double> c(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double r = g.nodes[j][0];
      switch (b.kind) {
        case DriftSpec::Kind::zero: c[j] = 0.0; break;
        case DriftSpec::Kind::linear: c[j] = b.coef * r; break;
        case DriftSpec::Kind::radial_power: c[j] = b.coef / r; break;
        case DriftSpec::Kind::nonuniqueness: c[j] = shell::b0(b.dim, r, t) / r; break;
        case DriftSpec::Kind::instability:
          c[j] = (b.dim - 2.0) / r - b.coef * r * std::log(r);
          break;
        case DriftSpec::Kind::constant:
          throw ConfigError("constant drift is not radially symmetric");
        case DriftSpec::Kind::sampled: break;  // handled above
      }
    }
    return {std::move(c)};
  }

  std::vector<std::vector<double>> out(axes, std::vector<double>(g.size()));
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto v = eval_drift(b, g.nodes[j], t);
    for (std::size_t a = 0; a < axes; ++a) out[a][j] = v[a];
  }
  return out;
}

/// Divergence at grid nodes: closed form for analytic kinds (including the
/// origin point mass on two-dimensional ball grids), column test for samples.
inline std::vector<double> divergence(const DriftSpec& b, const SpaceGrid& g,
                                      double t) {
  std::vector<double> d(g.size(), 0.0);
  const int n = b.dim;
  const bool ball = g.domain.kind == DomainKind::radial_ball;

  auto radius = [&](std::size_t j) {
    const double r = ball ? g.nodes[j][0] : std::hypot(g.nodes[j][0], g.nodes[j][1]);
    if (r == 0.0) throw ContractViolation("divergence is singular at the origin");
    return r;
  };

  switch (b.kind) {
    case DriftSpec::Kind::zero:
    case DriftSpec::Kind::constant:
      break;
    case DriftSpec::Kind::linear:
      for (auto& x : d) x = b.coef * n;
      break;
    case DriftSpec::Kind::radial_power:
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double r = radius(j);
        d[j] = b.coef * (n - 2.0) / (r * r);
      }
      if (ball && n == 2)
        d[0] += b.coef * 2.0 * std::numbers::pi / g.weights[0];
      break;
    case DriftSpec::Kind::nonuniqueness:
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double r = radius(j);
        d[j] = shell::b0_r(n, r, t) / r +
               (n - 2.0) * shell::b0(n, r, t) / (r * r);
      }
      if (ball && n == 2)
        d[0] += (n - 1.0) * 2.0 * std::numbers::pi / g.weights[0];
      break;
    case DriftSpec::Kind::instability:
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double r = radius(j);
        d[j] = -b.coef * (2.0 * std::log(r) + 1.0);
      }
      break;
    case DriftSpec::Kind::sampled: {
      const auto coef = advection_coefficients(b, g, t);
      const auto l = assemble_advection(g, coef, AdvectionScheme::upwind);
      const auto col = weighted_column_sums(l, g);
      for (std::size_t j = 0; j < g.size(); ++j) d[j] = -col[j];
      break;
    }
  }
  return d;
}

/// Sign convention: the drift is admissible when div b <= 0 everywhere a
/// solve will see it. max_divergence is the worst (largest) value found.
struct DivergenceCertificate {
  bool pass = false;
  double max_divergence = -std::numeric_limits<double>::infinity();
  double tol = 0.0;
  std::size_t worst_node = 0;
  int worst_time = 0;
  std::size_t tested_nodes = 0;
  std::string drift;
};

inline double default_certificate_tol(const DriftSpec& b, const SpaceGrid& g,
                                      const TimeGrid& tg) {
  double bmax = 0.0;
  const int k0 = b.kind == DriftSpec::Kind::nonuniqueness ? 1 : 0;
  for (int k = k0; k <= tg.steps; ++k) {
    const auto coef = advection_coefficients(b, g, tg.node(k));
    for (const auto& axis : coef)
      for (double c : axis) bmax = std::max(bmax, std::abs(c));
    if (!b.time_dependent()) break;
  }
  return 1e-10 * (1.0 + bmax / g.h());
}

inline DivergenceCertificate certify_divergence(
    const DriftSpec& b, const SpaceGrid& g, const TimeGrid& tg,
    std::optional<double> tolerance = std::nullopt,
    const std::vector<std::size_t>* subset = nullptr) {
  DivergenceCertificate rep;
  rep.drift = b.name();
  rep.tol = tolerance ? *tolerance : default_certificate_tol(b, g, tg);
  if (!(rep.tol > 0.0)) throw ConfigError("certificate tolerance must be positive");

  std::vector<std::size_t> all;
  if (!subset) {
    all.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) all[j] = j;
  }
  const auto& nodes = subset ? *subset : all;
  rep.tested_nodes = nodes.size();

  // the shell profile is defined for t > 0 only
  const int k0 = b.kind == DriftSpec::Kind::nonuniqueness ? 1 : 0;
  for (int k = k0; k <= tg.steps; ++k) {
    const auto d = divergence(b, g, tg.node(k));
    for (std::size_t j : nodes) {
      if (d[j] > rep.max_divergence) {
        rep.max_divergence = d[j];
        rep.worst_node = j;
        rep.worst_time = k;
      }
    }
    if (!b.time_dependent()) break;
  }
  rep.pass = rep.max_divergence <= rep.tol;
  return rep;
}

/// Multiply a drift by a scalar (used by the constant-stability reruns).
/// Shell and instability kinds have no meaningful scalar family.
inline DriftSpec scaled_drift(const DriftSpec& b, double s) {
  switch (b.kind) {
    case DriftSpec::Kind::zero:
      return b;
    case DriftSpec::Kind::constant:
      return DriftSpec::constant(b.dim, {s * b.vec[0], s * b.vec[1]});
    case DriftSpec::Kind::linear:
      return DriftSpec::linear(b.dim, s * b.coef);
    case DriftSpec::Kind::radial_power:
      return DriftSpec::radial_power(b.dim, s * b.coef);
    case DriftSpec::Kind::sampled: {
      auto d = std::make_shared<SampledDrift>(*b.data);
      for (auto& frame : d->values)
        for (double& v : frame) v *= s;
      return DriftSpec::sampled(std::move(d));
    }
    case DriftSpec::Kind::nonuniqueness:
    case DriftSpec::Kind::instability:
      break;
  }
  throw ContractViolation("drift kind " + b.name() + " has no scalar family");
}

/// Freeze a drift into nodal samples on (grid, times). The result feeds the
/// same advection assembly, so solves with the original and the sampled
/// field agree exactly.
inline DriftSpec sample_drift(const DriftSpec& b, const SpaceGrid& g,
                              const TimeGrid& tg) {
  auto d = std::make_shared<SampledDrift>();
  d->grid = std::make_shared<SpaceGrid>(g);
  d->time = tg;
  d->values.resize(tg.nodes());
  const int k0 = b.kind == DriftSpec::Kind::nonuniqueness ? 1 : 0;
  for (int k = 0; k <= tg.steps; ++k) {
    const auto coef = advection_coefficients(b, g, tg.node(std::max(k, k0)));
    d->components = static_cast<int>(coef.size());
    auto& frame = d->values[k];
    frame.reserve(coef.size() * g.size());
    for (const auto& axis : coef) frame.insert(frame.end(), axis.begin(), axis.end());
  }
  return DriftSpec::sampled(std::move(d));
}

}  // namespace driftlab
