#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "driftlab/errors.hpp"

namespace driftlab {

// Square banded matrix with equal lower/upper bandwidth. Row i stores the
// entries A(i, i-bw .. i+bw) contiguously; out-of-band reads return zero.
// Bandwidth 1 covers the 1-d stencils, nx covers the 2-d five-point stencil.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t bandwidth)
      : n_(n), bw_(bandwidth), a_(n * (2 * bandwidth + 1), 0.0) {}

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return bw_; }

  bool in_band(std::size_t i, std::size_t j) const {
    return (i <= j + bw_) && (j <= i + bw_);
  }

  double get(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? a_[slot(i, j)] : 0.0;
  }

  double& at(std::size_t i, std::size_t j) {
    if (!in_band(i, j)) throw ContractViolation("banded access outside band");
    return a_[slot(i, j)];
  }

  void add(std::size_t i, std::size_t j, double v) { at(i, j) += v; }

  BandedMatrix transposed() const {
    BandedMatrix t(n_, bw_);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = i > bw_ ? i - bw_ : 0;
      const std::size_t j1 = std::min(n_ - 1, i + bw_);
      for (std::size_t j = j0; j <= j1; ++j) t.at(j, i) = get(i, j);
    }
    return t;
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_)
      throw ContractViolation("banded multiply: size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = i > bw_ ? i - bw_ : 0;
      const std::size_t j1 = std::min(n_ - 1, i + bw_);
      double s = 0.0;
      for (std::size_t j = j0; j <= j1; ++j) s += a_[slot(i, j)] * x[j];
      y[i] = s;
    }
  }

 private:
  std::size_t slot(std::size_t i, std::size_t j) const {
    return i * (2 * bw_ + 1) + (j + bw_ - i);
  }

  std::size_t n_, bw_;
  std::vector<double> a_;
};

// LU factorization without pivoting. The step matrices this lab produces are
// strictly row diagonally dominant M-matrices, for which pivot-free Gaussian
// elimination is stable and fill stays inside the band.
class BandedLU {
 public:
  explicit BandedLU(BandedMatrix a) : lu_(std::move(a)) {
    const std::size_t n = lu_.size();
    const std::size_t bw = lu_.bandwidth();
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double piv = lu_.get(k, k);
      if (piv == 0.0 || !std::isfinite(piv))
        throw NumericalError("banded LU: zero or non-finite pivot at row " +
                             std::to_string(k));
      const std::size_t iend = std::min(n - 1, k + bw);
      for (std::size_t i = k + 1; i <= iend; ++i) {
        const double m = lu_.get(i, k) / piv;
        if (m == 0.0) continue;
        lu_.at(i, k) = m;
        const std::size_t jend = std::min(n - 1, k + bw);
        for (std::size_t j = k + 1; j <= jend; ++j)
          lu_.at(i, j) -= m * lu_.get(k, j);
      }
    }
    if (lu_.get(n - 1, n - 1) == 0.0)
      throw NumericalError("banded LU: singular matrix");
  }

  // Solve A x = b in place.
  void solve(std::span<double> x) const {
    const std::size_t n = lu_.size();
    const std::size_t bw = lu_.bandwidth();
    if (x.size() != n) throw ContractViolation("banded solve: size mismatch");
    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t j0 = i > bw ? i - bw : 0;
      double s = x[i];
      for (std::size_t j = j0; j < i; ++j) s -= lu_.get(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      const std::size_t j1 = std::min(n - 1, ii + bw);
      double s = x[ii];
      for (std::size_t j = ii + 1; j <= j1; ++j) s -= lu_.get(ii, j) * x[j];
      x[ii] = s / lu_.get(ii, ii);
    }
  }

  // Solve A^T x = b in place using the same factors (A^T = U^T L^T).
  void solve_transposed(std::span<double> x) const {
    const std::size_t n = lu_.size();
    const std::size_t bw = lu_.bandwidth();
    if (x.size() != n) throw ContractViolation("banded solve: size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j0 = i > bw ? i - bw : 0;
      double s = x[i];
      for (std::size_t j = j0; j < i; ++j) s -= lu_.get(j, i) * x[j];
      x[i] = s / lu_.get(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      const std::size_t j1 = std::min(n - 1, ii + bw);
      double s = x[ii];
      for (std::size_t j = ii + 1; j <= j1; ++j) s -= lu_.get(j, ii) * x[j];
      x[ii] = s;
    }
  }

 private:
  BandedMatrix lu_;
};

}  // namespace driftlab
