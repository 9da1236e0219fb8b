#pragma once

/// Gram matrices of the score process over the indicator class.
///
/// Raw kernel:   Kg[i,j]    = sum_k w_k g(Z_i, t_k) g(Z_j, t_k),
///               the quadrature image of  K(z1,z2) = \int g(z1,t) g(z2,t) dF(t).
/// Orthogonal:   Kperp      = P Kg P  with  P = I - L (L'L)^{-1} L',
///               the Gram of the score process projected off the span of the
///               per-row likelihood scores, so parameter estimation error is
///               first-order annihilated and the bootstrap can hold nuisances
///               fixed.
///
/// The projection is computed through a thin SVD of L; (L'L)^{-1} is never
/// formed. An alternative orthogonalization replaces the empirical
/// cross-moment with the analytic derivative matrix B (per scheme closed
/// forms); it is exposed as a cross-validation mode.

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "orthofit/error.hpp"
#include "orthofit/quadrature.hpp"
#include "orthofit/sample.hpp"
#include "orthofit/scores.hpp"

namespace orthofit {

enum class kernel_mode { quadrature, closed_form };
enum class b_mode { projection, analytic };

struct gram_bundle {
  quadrature_grid grid;
  Eigen::MatrixXd A;      // n x m score evaluations, A[i,k] = g(Z_i, t_k); empty in closed form mode
  Eigen::MatrixXd Kg;     // n x n raw Gram
  Eigen::MatrixXd Kperp;  // n x n orthogonalized Gram (equals Kg in simple-null mode)
};

/// Probability-scale breakpoints of the sample under the engine's F, for the
/// composite quadrature panels.
inline std::vector<double> sample_breakpoints(const score_engine& engine,
                                              const observed_sample& s) {
  std::vector<double> breaks;
  for (double a : engine.jump_abscissae(s)) {
    breaks.push_back(engine.fam().cdf(engine.params(), a));
  }
  return breaks;
}

/// Fill A[i,k] = g_indicator(Z_i, t_k) and return Kg = A diag(w) A'.
inline Eigen::MatrixXd gram_raw(const score_engine& engine, const observed_sample& s,
                                const quadrature_grid& grid, Eigen::MatrixXd* A_out = nullptr) {
  const std::size_t n = s.n();
  const std::size_t m = grid.size();
  Eigen::MatrixXd A(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) A(i, k) = engine.g_indicator(s, i, grid.t[k]);
  }
  const Eigen::Map<const Eigen::VectorXd> w(grid.w.data(), static_cast<Eigen::Index>(m));
  Eigen::MatrixXd Kg = A * w.asDiagonal() * A.transpose();
  Kg = 0.5 * (Kg + Kg.transpose()).eval();
  if (A_out) *A_out = std::move(A);
  return Kg;
}

/// Closed form of the complete-data indicator Gram: with a = F(z_i),
/// b = F(z_j), the s-scale integral of (1{a<=s}-s)(1{b<=s}-s) is
///   1 - max(a,b) - (1-a^2)/2 - (1-b^2)/2 + 1/3.
inline Eigen::MatrixXd gram_closed_complete(const score_engine& engine,
                                            const observed_sample& s) {
  if (engine.scheme() != scheme_id::complete) {
    throw validation_error("closed-form Gram is available for the complete scheme only");
  }
  const std::size_t n = s.n();
  std::vector<double> F(n);
  for (std::size_t i = 0; i < n; ++i) F[i] = engine.fam().cdf(engine.params(), s.x[i]);
  Eigen::MatrixXd Kg(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double a = F[i], b = F[j];
      const double val = 1.0 - std::max(a, b) - 0.5 * (1.0 - a * a) - 0.5 * (1.0 - b * b) + 1.0 / 3.0;
      Kg(i, j) = val;
      Kg(j, i) = val;
    }
  }
  return Kg;
}

namespace detail {

/// Thin orthonormal basis of span(L), with the rank/conditioning contract:
/// an exactly zero L means "no projection" (simple null); a rank-deficient
/// nonzero L is an error.
inline bool score_span_basis(const Eigen::MatrixXd& L, Eigen::MatrixXd& U) {
  if (L.size() == 0 || L.cols() == 0) return false;
  if (L.cwiseAbs().maxCoeff() == 0.0) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  // cond(L'L) = (sigma_max/sigma_min)^2 must stay below 1e12.
  if (!(sv(sv.size() - 1) > sv(0) * 1e-6)) {
    throw numeric_error("gram_orthogonal: score matrix is numerically rank deficient");
  }
  U = svd.matrixU();
  return true;
}

}  // namespace detail

/// Rows of M projected onto the orthogonal complement of span(L): (I - P) M.
inline Eigen::MatrixXd project_score_complement(const Eigen::MatrixXd& M,
                                                const Eigen::MatrixXd& L) {
  Eigen::MatrixXd U;
  if (!detail::score_span_basis(L, U)) return M;
  return M - U * (U.transpose() * M);
}

/// Kperp = (I-P) Kg (I-P). An all-zero or empty L skips the projection.
inline Eigen::MatrixXd gram_orthogonal(const Eigen::MatrixXd& Kg, const Eigen::MatrixXd& L) {
  Eigen::MatrixXd U;
  if (!detail::score_span_basis(L, U)) return Kg;
  const Eigen::MatrixXd T = U.transpose() * Kg;          // p x n
  const Eigen::MatrixXd TU = T * U;                      // p x p
  Eigen::MatrixXd Kperp = Kg - U * T - T.transpose() * U.transpose() + U * TU * U.transpose();
  return 0.5 * (Kperp + Kperp.transpose()).eval();
}

/// Analytic derivative matrix: row k is B(phi_{t_k}, theta), the scheme
/// closed form of E[d g_{phi_t}(Z, theta) / d theta'].
inline Eigen::MatrixXd analytic_b_matrix(const score_engine& engine, const observed_sample& s,
                                         const quadrature_grid& grid, const Eigen::MatrixXd& L) {
  const std::size_t n = s.n();
  const std::size_t m = grid.size();
  const int p = engine.fam().dim();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, p);
  const auto& th = engine.params();

  switch (engine.scheme()) {
    case scheme_id::complete:
      // B(phi_t) = -E[ 1{x<=t} l(x)' ].
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
          if (s.x[i] <= grid.t[k]) B.row(k) -= L.row(i);
        }
      }
      break;
    case scheme_id::complete_hazard:
      // d g / d theta = -dLambda(min(x,t))/dtheta pointwise.
      for (std::size_t i = 0; i < n; ++i) {
        const vec full = engine.fam().cumhaz_grad(th, s.x[i]);
        for (std::size_t k = 0; k < m; ++k) {
          B.row(k) -= (s.x[i] <= grid.t[k] ? full
                                           : engine.fam().cumhaz_grad(th, grid.t[k]));
        }
      }
      break;
    case scheme_id::ltrc:
      // B(phi_t) = -E[ 1{y<=t} h(y) delta ].
      for (std::size_t i = 0; i < n; ++i) {
        if (!s.delta[i]) continue;
        const vec h = engine.hazard_score(s.y[i]);
        for (std::size_t k = 0; k < m; ++k) {
          if (s.y[i] <= grid.t[k]) B.row(k) -= h;
        }
      }
      break;
    case scheme_id::double_trunc:
      // B(phi_t) = -E[ 1{x<=t} l(z)' ].
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
          if (s.x[i] <= grid.t[k]) B.row(k) -= L.row(i);
        }
      }
      break;
    case scheme_id::current_status:
      // d g / d theta = -1{c<=t} dF(c)/dtheta pointwise (weighted if requested).
      for (std::size_t i = 0; i < n; ++i) {
        vec dF = engine.fam().cdf_grad(th, s.c[i]);
        if (engine.options().cs_weight) {
          const double cdfv = engine.fam().cdf(th, s.c[i]);
          const double surv = std::exp(-engine.fam().cumhaz(th, s.c[i]));
          dF /= std::sqrt(cdfv * surv);
        }
        for (std::size_t k = 0; k < m; ++k) {
          if (s.c[i] <= grid.t[k]) B.row(k) -= dF;
        }
      }
      break;
  }
  return B / static_cast<double>(n);
}

struct gram_options {
  std::size_t grid_size = 256;
  grid_rule rule = grid_rule::gauss_legendre;
  /// Split the quadrature into composite panels at the sample's breakpoints.
  bool adapt_to_sample = true;
  kernel_mode kernel = kernel_mode::quadrature;
  b_mode bmode = b_mode::projection;
};

/// Assemble grid, A, Kg and Kperp. Passing no score matrix (simple-null
/// mode, theta known) skips the orthogonalization entirely. I_hat is needed
/// only for the analytic B mode.
inline gram_bundle build_gram(const score_engine& engine, const observed_sample& s,
                              const gram_options& opt, const Eigen::MatrixXd* L = nullptr,
                              const Eigen::MatrixXd* I_hat = nullptr) {
  gram_bundle bundle;
  if (opt.kernel == kernel_mode::closed_form) {
    if (opt.bmode == b_mode::analytic) {
      throw validation_error("analytic B mode requires the quadrature kernel");
    }
    bundle.Kg = gram_closed_complete(engine, s);
    bundle.Kperp = L ? gram_orthogonal(bundle.Kg, *L) : bundle.Kg;
    return bundle;
  }

  std::vector<double> breaks;
  if (opt.adapt_to_sample) breaks = sample_breakpoints(engine, s);
  bundle.grid = build_grid(engine.fam(), engine.params(), opt.grid_size, opt.rule, breaks);
  bundle.Kg = gram_raw(engine, s, bundle.grid, &bundle.A);

  if (!L) {
    bundle.Kperp = bundle.Kg;
    return bundle;
  }
  if (opt.bmode == b_mode::projection) {
    bundle.Kperp = gram_orthogonal(bundle.Kg, *L);
  } else {
    if (!I_hat) throw validation_error("analytic B mode requires the Fisher estimate");
    const Eigen::MatrixXd B = analytic_b_matrix(engine, s, bundle.grid, *L);
    // H[i,k] = A[i,k] + B[k,:] I^{-1} l_i  =>  H = A + L I^{-1} B'.
    const Eigen::MatrixXd H =
        bundle.A + *L * I_hat->ldlt().solve(B.transpose());
    const Eigen::Map<const Eigen::VectorXd> w(bundle.grid.w.data(),
                                              static_cast<Eigen::Index>(bundle.grid.size()));
    bundle.Kperp = H * w.asDiagonal() * H.transpose();
    bundle.Kperp = 0.5 * (bundle.Kperp + bundle.Kperp.transpose()).eval();
  }
  return bundle;
}

}  // namespace orthofit
