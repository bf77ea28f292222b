#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "driftlab/banded.hpp"

using namespace driftlab;
using Catch::Approx;

namespace {

// Deterministic uniform in (0,1).
double u01(std::mt19937& rng) { return (rng() + 0.5) / 4294967296.0; }

// Random strictly diagonally dominant banded matrix.
BandedMatrix random_dominant(std::size_t n, std::size_t bw, unsigned seed) {
  std::mt19937 rng(seed);
  BandedMatrix a(n, bw);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    const std::size_t j0 = i > bw ? i - bw : 0;
    const std::size_t j1 = std::min(n - 1, i + bw);
    for (std::size_t j = j0; j <= j1; ++j) {
      if (j == i) continue;
      const double v = 2.0 * u01(rng) - 1.0;
      a.at(i, j) = v;
      off += std::abs(v);
    }
    a.at(i, i) = off + 1.0 + u01(rng);
  }
  return a;
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = 2.0 * u01(rng) - 1.0;
  return x;
}

}  // namespace

TEST_CASE("band storage returns zero outside the band and guards writes") {
  BandedMatrix a(5, 1);
  a.at(2, 1) = 3.0;
  a.at(2, 2) = 4.0;
  CHECK(a.get(2, 1) == 3.0);
  CHECK(a.get(2, 4) == 0.0);
  CHECK(a.get(0, 4) == 0.0);
  CHECK_THROWS_AS(a.at(0, 4), ContractViolation);
  CHECK(a.in_band(3, 4));
  CHECK_FALSE(a.in_band(3, 5));
}

TEST_CASE("multiply agrees with the dense definition") {
  const auto a = random_dominant(12, 3, 11);
  const auto x = random_vector(12, 12);
  std::vector<double> y(12);
  a.multiply(x, y);
  for (std::size_t i = 0; i < 12; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 12; ++j) s += a.get(i, j) * x[j];
    CHECK(y[i] == Approx(s).margin(1e-14));
  }
}

TEST_CASE("transposed swaps entries exactly") {
  const auto a = random_dominant(9, 2, 21);
  const auto t = a.transposed();
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) CHECK(t.get(j, i) == a.get(i, j));
}

TEST_CASE("LU solve reproduces manufactured solutions") {
  for (unsigned seed : {1u, 2u, 3u}) {
    for (std::size_t bw : {std::size_t{1}, std::size_t{4}}) {
      const std::size_t n = 40;
      const auto a = random_dominant(n, bw, seed);
      const auto x_true = random_vector(n, seed + 100);
      std::vector<double> b(n);
      a.multiply(x_true, b);
      const BandedLU lu(a);
      lu.solve(b);
      for (std::size_t j = 0; j < n; ++j)
        CHECK(b[j] == Approx(x_true[j]).margin(1e-11));
    }
  }
}

TEST_CASE("transposed solve matches factoring the transpose") {
  const std::size_t n = 30, bw = 2;
  const auto a = random_dominant(n, bw, 7);
  const auto x_true = random_vector(n, 8);
  std::vector<double> b(n);
  a.transposed().multiply(x_true, b);

  // route 1: shared factors of A
  std::vector<double> x1 = b;
  BandedLU lu(a);
  lu.solve_transposed(x1);
  // route 2: explicit factorization of A^T
  std::vector<double> x2 = b;
  BandedLU lut(a.transposed());
  lut.solve(x2);

  for (std::size_t j = 0; j < n; ++j) {
    CHECK(x1[j] == Approx(x_true[j]).margin(1e-11));
    CHECK(x1[j] == Approx(x2[j]).margin(1e-12));
  }
}

TEST_CASE("singular and non-finite pivots are reported") {
  BandedMatrix z(3, 1);
  z.at(0, 0) = 0.0;
  CHECK_THROWS_AS(BandedLU(z), NumericalError);

  BandedMatrix s(2, 1);
  // second pivot vanishes after elimination: [[1,1],[1,1]]
  s.at(0, 0) = 1.0;
  s.at(0, 1) = 1.0;
  s.at(1, 0) = 1.0;
  s.at(1, 1) = 1.0;
  CHECK_THROWS_AS(BandedLU(s), NumericalError);

  BandedMatrix nf(2, 1);
  nf.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
  nf.at(1, 1) = 1.0;
  CHECK_THROWS_AS(BandedLU(nf), NumericalError);
}

TEST_CASE("size mismatches are contract violations") {
  const auto a = random_dominant(5, 1, 3);
  std::vector<double> wrong(4, 0.0);
  std::vector<double> y(5, 0.0);
  CHECK_THROWS_AS(a.multiply(wrong, y), ContractViolation);
  const BandedLU lu(a);
  CHECK_THROWS_AS(lu.solve(wrong), ContractViolation);
  CHECK_THROWS_AS(lu.solve_transposed(wrong), ContractViolation);
}
