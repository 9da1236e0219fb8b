#pragma once

/// Quadrature grids for the RKHS inner product over the indicator class.
/// Integrals \int h(t) dF_theta(t) are pulled back to the probability scale
/// via t = F_theta^{-1}(s), so the grid is a rule on (0,1): nodes s_k mapped
/// through the quantile function, with positive weights summing to one.
///
/// When breakpoints are supplied (the F-images of the sample's jump
/// abscissae), the rule is applied compositely on each panel between
/// consecutive breakpoints. Indicator scores are piecewise smooth exactly
/// between those breakpoints, so the composite rule restores full accuracy
/// where a plain rule would stall at O(1/m) on the jumps; composite
/// Gauss-Legendre with at least two nodes per panel integrates the
/// piecewise-quadratic complete-data integrands exactly.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "orthofit/error.hpp"
#include "orthofit/family.hpp"
#include "orthofit/specfun.hpp"

namespace orthofit {

enum class grid_rule { gauss_legendre, midpoint };

inline grid_rule parse_grid_rule(std::string_view s) {
  if (s == "gl" || s == "gauss-legendre") return grid_rule::gauss_legendre;
  if (s == "mid" || s == "midpoint") return grid_rule::midpoint;
  throw validation_error("unknown grid rule '" + std::string(s) + "' (expected gl or mid)");
}

inline std::string_view grid_rule_name(grid_rule r) {
  return r == grid_rule::gauss_legendre ? "gauss-legendre" : "midpoint";
}

struct quadrature_grid {
  std::vector<double> s;  // nodes on the probability scale, strictly ascending
  std::vector<double> t;  // t_k = F^{-1}(s_k), strictly ascending
  std::vector<double> w;  // positive weights, summing to 1

  std::size_t size() const noexcept { return t.size(); }
};

namespace detail {

/// Append the rule's nodes/weights for one panel (lo, hi) of the unit interval.
inline void fill_panel(grid_rule rule, double lo, double hi, std::size_t count,
                       std::vector<double>& s, std::vector<double>& w) {
  if (rule == grid_rule::gauss_legendre) {
    std::vector<double> xs, ws;
    gauss_legendre_on(lo, hi, count, xs, ws);
    s.insert(s.end(), xs.begin(), xs.end());
    w.insert(w.end(), ws.begin(), ws.end());
  } else {
    const double h = (hi - lo) / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) {
      s.push_back(lo + (static_cast<double>(k) + 0.5) * h);
      w.push_back(h);
    }
  }
}

}  // namespace detail

/// Build a grid of roughly m nodes. With no breakpoints this is the plain
/// rule on (0,1). With breakpoints (probability scale, open interval), nodes
/// are distributed over the panels proportionally to panel width, with at
/// least two nodes per panel, so the total may exceed m.
inline quadrature_grid build_grid(const family& fam, const theta_vector& th, std::size_t m,
                                  grid_rule rule, std::span<const double> breaks_s = {}) {
  if (m == 0) throw validation_error("build_grid: node count must be positive");

  std::vector<double> edges{0.0};
  if (!breaks_s.empty()) {
    std::vector<double> b(breaks_s.begin(), breaks_s.end());
    std::sort(b.begin(), b.end());
    for (double s : b) {
      if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;  // panels at the ends would be empty
      if (s - edges.back() > 1e-10) edges.push_back(s);
    }
  }
  if (1.0 - edges.back() <= 1e-10) edges.pop_back();
  edges.push_back(1.0);

  quadrature_grid grid;
  const std::size_t npanel = edges.size() - 1;
  grid.s.reserve(std::max<std::size_t>(m, 2 * npanel));
  grid.w.reserve(grid.s.capacity());
  for (std::size_t j = 0; j < npanel; ++j) {
    const double lo = edges[j], hi = edges[j + 1];
    std::size_t count = npanel == 1
                            ? m
                            : std::max<std::size_t>(
                                  2, static_cast<std::size_t>(std::llround(
                                         static_cast<double>(m) * (hi - lo))));
    detail::fill_panel(rule, lo, hi, count, grid.s, grid.w);
  }

  grid.t.resize(grid.s.size());
  for (std::size_t k = 0; k < grid.s.size(); ++k) grid.t[k] = fam.quantile(th, grid.s[k]);
  for (std::size_t k = 1; k < grid.t.size(); ++k) {
    if (!(grid.t[k] > grid.t[k - 1])) {
      throw numeric_error("build_grid: quantile map produced non-increasing nodes");
    }
  }
  return grid;
}

}  // namespace orthofit
