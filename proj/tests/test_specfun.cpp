// Special functions and quadrature rules: frozen third-party oracle values
// plus the defining identities (recurrences, symmetry, polynomial exactness).

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "orthofit/error.hpp"
#include "orthofit/specfun.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// |got - want| <= abs_tol + rel_tol * |want|, the right shape for tables that
// span hundreds of orders of magnitude.
void check_close(double got, double want, double rel_tol, double abs_tol) {
  CAPTURE(got, want);
  CHECK(std::abs(got - want) <= abs_tol + rel_tol * std::abs(want));
}

}  // namespace

TEST_CASE("gamma_p matches scipy.special.gammainc", "[specfun]") {
  // Frozen from scipy 1.15.3: scipy.special.gammainc(a, x).
  const struct {
    double a, x, p;
  } table[] = {
      {0.3, 0.1, 0.5459128495917965},
      {0.3, 1.0, 0.9156741562411086},
      {0.3, 3.0, 0.9935096273009015},
      {0.3, 10.0, 0.9999971551553328},
      {0.3, 50.0, 1.0},
      {0.3, 200.0, 1.0},
      {1.0, 0.1, 0.09516258196404044},
      {1.0, 1.0, 0.6321205588285577},
      {1.0, 3.0, 0.950212931632136},
      {1.0, 10.0, 0.9999546000702375},
      {1.0, 50.0, 1.0},
      {1.0, 200.0, 1.0},
      {2.5, 0.1, 0.0008861387888124438},
      {2.5, 1.0, 0.15085496391539038},
      {2.5, 3.0, 0.6937810815867212},
      {2.5, 10.0, 0.9987502694369687},
      {2.5, 50.0, 1.0},
      {2.5, 200.0, 1.0},
      {7.0, 0.1, 1.8180056068736556e-11},
      {7.0, 1.0, 8.32411492880231e-05},
      {7.0, 3.0, 0.033508535308841216},
      {7.0, 10.0, 0.869858579117517},
      {7.0, 50.0, 0.9999999999999952},
      {7.0, 200.0, 1.0},
      {30.0, 0.1, 3.422264318380487e-63},
      {30.0, 1.0, 1.4330814167223303e-33},
      {30.0, 3.0, 4.277047721426935e-20},
      {30.0, 10.0, 2.509951201527959e-07},
      {30.0, 50.0, 0.999083171138544},
      {30.0, 200.0, 1.0},
      {150.0, 1.0, 6.4818304762487295e-264},
      {150.0, 3.0, 3.2894660604843344e-193},
      {150.0, 10.0, 8.509523870867125e-118},
      {150.0, 50.0, 3.530612225414933e-30},
      {150.0, 200.0, 0.9999032137800506},
  };
  for (const auto& row : table) {
    CAPTURE(row.a, row.x);
    check_close(orthofit::gamma_p(row.a, row.x), row.p, 1e-11, 1e-15);
  }
  // Underflow region: the true value ~1e-370 is below the double range.
  CHECK(orthofit::gamma_p(150.0, 0.1) <= 1e-300);
}

TEST_CASE("gamma_p basic properties", "[specfun]") {
  CHECK(orthofit::gamma_p(3.7, 0.0) == 0.0);
  // Monotone in x.
  double prev = 0.0;
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 15.0}) {
    const double cur = orthofit::gamma_p(2.0, x);
    CHECK(cur >= prev);
    prev = cur;
  }
  // P(1, x) = 1 - e^{-x}.
  for (double x : {0.2, 1.0, 4.0}) {
    check_close(orthofit::gamma_p(1.0, x), -std::expm1(-x), 1e-13, 0.0);
  }
  CHECK_THROWS_AS(orthofit::gamma_p(0.0, 1.0), orthofit::validation_error);
  CHECK_THROWS_AS(orthofit::gamma_p(-2.0, 1.0), orthofit::validation_error);
  CHECK_THROWS_AS(orthofit::gamma_p(1.0, -0.5), orthofit::validation_error);
}

TEST_CASE("digamma matches scipy.special.digamma", "[specfun]") {
  // Frozen from scipy 1.15.3: scipy.special.digamma(x).
  const struct {
    double x, psi;
  } table[] = {
      {0.07, -14.753326705581838}, {0.5, -1.9635100260214235}, {1.0, -0.5772156649015329},
      {1.5, 0.03648997397857652},  {2.0, 0.42278433509846713}, {3.7, 1.1671535393615113},
      {6.0, 1.7061176684318005},   {10.0, 2.251752589066721},  {42.5, 3.737693236500094},
      {500.0, 6.213607765088991},
  };
  for (const auto& row : table) {
    CAPTURE(row.x);
    CHECK_THAT(orthofit::digamma(row.x), WithinAbs(row.psi, 5e-10));
  }
}

TEST_CASE("digamma identities", "[specfun]") {
  CHECK_THAT(orthofit::digamma(1.0), WithinAbs(-orthofit::euler_gamma, 5e-10));
  // Recurrence psi(x+1) = psi(x) + 1/x.
  for (double x : {0.11, 0.8, 2.3, 5.9, 17.0}) {
    CAPTURE(x);
    CHECK_THAT(orthofit::digamma(x + 1.0), WithinAbs(orthofit::digamma(x) + 1.0 / x, 1e-12));
  }
  CHECK_THROWS_AS(orthofit::digamma(0.0), orthofit::validation_error);
  CHECK_THROWS_AS(orthofit::digamma(-3.0), orthofit::validation_error);
}

TEST_CASE("Gauss-Legendre m=5 matches numpy leggauss", "[specfun]") {
  // Frozen from numpy 2.2.6: numpy.polynomial.legendre.leggauss(5).
  const double nodes[5] = {-0.906179845938664, -0.5384693101056831, 0.0, 0.5384693101056831,
                           0.906179845938664};
  const double weights[5] = {0.23692688505618942, 0.4786286704993662, 0.568888888888889,
                             0.4786286704993662, 0.23692688505618942};
  std::vector<double> x, w;
  orthofit::gauss_legendre(5, x, w);
  REQUIRE(x.size() == 5);
  for (int k = 0; k < 5; ++k) {
    CAPTURE(k);
    CHECK_THAT(x[k], WithinAbs(nodes[k], 1e-14));
    CHECK_THAT(w[k], WithinAbs(weights[k], 1e-14));
  }
}

TEST_CASE("Gauss-Legendre rule properties", "[specfun]") {
  for (std::size_t m : {1u, 2u, 3u, 7u, 16u, 33u, 64u, 333u}) {
    CAPTURE(m);
    std::vector<double> x, w;
    orthofit::gauss_legendre(m, x, w);
    REQUIRE(x.size() == m);
    REQUIRE(w.size() == m);
    // Weights positive and summing to the interval length 2.
    double sum = 0.0;
    for (double wk : w) {
      CHECK(wk > 0.0);
      sum += wk;
    }
    CHECK_THAT(sum, WithinAbs(2.0, 1e-13));
    // Nodes strictly ascending, inside (-1,1), and symmetric about 0.
    for (std::size_t k = 0; k + 1 < m; ++k) CHECK(x[k] < x[k + 1]);
    CHECK(x.front() > -1.0);
    CHECK(x.back() < 1.0);
    for (std::size_t k = 0; k < m; ++k) {
      CHECK_THAT(x[k], WithinAbs(-x[m - 1 - k], 1e-14));
      CHECK_THAT(w[k], WithinAbs(w[m - 1 - k], 1e-14));
    }
  }
}

TEST_CASE("Gauss-Legendre integrates polynomials up to degree 2m-1 exactly", "[specfun]") {
  const std::size_t m = 8;
  std::vector<double> x, w;
  orthofit::gauss_legendre(m, x, w);
  for (int deg = 0; deg <= 15; ++deg) {
    double got = 0.0;
    for (std::size_t k = 0; k < m; ++k) got += w[k] * std::pow(x[k], deg);
    const double want = (deg % 2 == 1) ? 0.0 : 2.0 / (deg + 1.0);
    CAPTURE(deg);
    CHECK_THAT(got, WithinAbs(want, 1e-13));
  }
  // Degree 2m = 16 must NOT be integrated exactly (sanity that the exactness
  // check has teeth).
  double got = 0.0;
  for (std::size_t k = 0; k < m; ++k) got += w[k] * std::pow(x[k], 16);
  CHECK(std::abs(got - 2.0 / 17.0) > 1e-10);
}

TEST_CASE("Gauss-Legendre mapped onto an interval", "[specfun]") {
  std::vector<double> x, w;
  orthofit::gauss_legendre_on(2.0, 5.0, 12, x, w);
  CHECK_THAT(std::accumulate(w.begin(), w.end(), 0.0), WithinAbs(3.0, 1e-13));
  CHECK(x.front() > 2.0);
  CHECK(x.back() < 5.0);
  // int_2^5 x^2 dx = (125 - 8) / 3 = 39.
  double got = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) got += w[k] * x[k] * x[k];
  CHECK_THAT(got, WithinRel(39.0, 1e-13));
}

TEST_CASE("gauss_legendre rejects m = 0", "[specfun]") {
  std::vector<double> x, w;
  CHECK_THROWS_AS(orthofit::gauss_legendre(0, x, w), orthofit::validation_error);
}
