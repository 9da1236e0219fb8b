#pragma once

/// Special functions and quadrature rules used by the statistical core:
/// regularized lower incomplete gamma, digamma, and Gauss-Legendre nodes.

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "orthofit/error.hpp"

namespace orthofit {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

namespace detail {

/// Series expansion of P(a,x) = gamma(a,x)/Gamma(a), effective for x < a+1:
/// P(a,x) = x^a e^-x / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k)).
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int k = 0; k < 500; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw numeric_error("incomplete gamma: series failed to converge");
}

/// Continued fraction for Q(a,x) = 1 - P(a,x) (modified Lentz), for x >= a+1.
inline double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw numeric_error("incomplete gamma: continued fraction failed to converge");
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a,x) = (1/Gamma(a)) \int_0^x t^{a-1}e^{-t} dt.
inline double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw validation_error("gamma_p: shape must be positive");
  if (x < 0.0) throw validation_error("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_contfrac(a, x);
}

/// Digamma psi(x) = d/dx log Gamma(x) for x > 0; shifts x upward by the
/// recurrence psi(x) = psi(x+1) - 1/x, then applies the asymptotic series.
inline double digamma(double x) {
  if (!(x > 0.0)) throw validation_error("digamma: requires x > 0");
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum B_{2k}/(2k x^{2k}).
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
  return result;
}

/// Gauss-Legendre nodes and weights on (-1,1), by Newton iteration on P_m
/// with the standard Chebyshev-flavored initial guesses. Nodes ascend.
inline void gauss_legendre(std::size_t m, std::vector<double>& nodes, std::vector<double>& weights) {
  if (m == 0) throw validation_error("gauss_legendre: node count must be positive");
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  const std::size_t half = (m + 1) / 2;
  for (std::size_t k = 0; k < half; ++k) {
    // Initial guess for the k-th root of P_m (descending order).
    double z = std::cos(M_PI * (static_cast<double>(k) + 0.75) / (static_cast<double>(m) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_m(z) and P_{m-1}(z) by the three-term recurrence.
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    nodes[k] = -z;
    nodes[m - 1 - k] = z;
    weights[k] = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[m - 1 - k] = weights[k];
  }
}

/// Gauss-Legendre rule mapped onto (lo, hi); weights sum to hi - lo.
inline void gauss_legendre_on(double lo, double hi, std::size_t m, std::vector<double>& nodes,
                              std::vector<double>& weights) {
  gauss_legendre(m, nodes, weights);
  const double mid = 0.5 * (lo + hi);
  const double halfwidth = 0.5 * (hi - lo);
  for (std::size_t k = 0; k < m; ++k) {
    nodes[k] = mid + halfwidth * nodes[k];
    weights[k] *= halfwidth;
  }
}

}  // namespace orthofit
