#pragma once

/// The goodness-of-fit test: statistic, multiplier bootstrap, p-value.
///
/// The statistic is the quadratic form
///     nQ = (1/n) sum_{i,j} Kperp[i,j],
/// the squared RKHS norm of the empirical mean of the orthogonalized score
/// process. Critical values come from the multiplier bootstrap
///     nQ*_b = (1/n) omega_b' Kperp omega_b,
/// with iid mean-zero unit-variance multipliers and all nuisances (theta_hat,
/// the score matrix, the Gram) held fixed across draws. Each draw has its own
/// counter-based RNG stream, so the result is independent of threading.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orthofit/error.hpp"
#include "orthofit/family.hpp"
#include "orthofit/gram.hpp"
#include "orthofit/mle.hpp"
#include "orthofit/parallel.hpp"
#include "orthofit/rng.hpp"
#include "orthofit/sample.hpp"
#include "orthofit/scores.hpp"

namespace orthofit {

enum class multiplier_kind { mammen, rademacher };

inline multiplier_kind parse_multiplier(std::string_view s) {
  if (s == "mammen") return multiplier_kind::mammen;
  if (s == "rademacher") return multiplier_kind::rademacher;
  throw validation_error("unknown multiplier '" + std::string(s) +
                         "' (expected mammen or rademacher)");
}

inline std::string_view multiplier_name(multiplier_kind k) {
  return k == multiplier_kind::mammen ? "mammen" : "rademacher";
}

struct bootstrap_config {
  std::size_t B = 499;
  multiplier_kind multiplier = multiplier_kind::mammen;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware default
};

struct test_options {
  std::size_t grid_size = 256;
  grid_rule rule = grid_rule::gauss_legendre;
  bool adapt_grid = true;
  kernel_mode kernel = kernel_mode::quadrature;
  b_mode bmode = b_mode::projection;
  /// Known parameter: skip estimation and orthogonalization entirely.
  std::optional<theta_vector> simple_null;
  engine_options engine;
};

struct test_result {
  scheme_id scheme = scheme_id::complete;
  std::string family;
  std::size_t n = 0;
  theta_vector theta_hat;
  double stat_nQ = 0.0;
  double stat_unprojected = 0.0;  // diagnostic: same form on the raw Gram
  std::vector<double> boot_draws;
  double p_value = 1.0;
  bool simple_null = false;
  std::size_t grid_size = 0;  // actual node count used
  grid_rule rule = grid_rule::gauss_legendre;
  multiplier_kind multiplier = multiplier_kind::mammen;
  std::uint64_t seed = 0;
  // Fit diagnostics (defaulted in simple-null mode).
  bool fit_converged = true;
  int fit_iterations = 0;
  double fit_grad_norm = 0.0;
};

/// nQ = (1/n) 1' Kperp 1.
inline double statistic(const gram_bundle& bundle) {
  const auto n = static_cast<double>(bundle.Kperp.rows());
  if (n == 0) throw validation_error("statistic: empty Gram");
  return bundle.Kperp.sum() / n;
}

/// One bootstrap draw with explicit multipliers: (1/n) omega' Kperp omega.
inline double bootstrap_draw(const gram_bundle& bundle, const Eigen::VectorXd& omega) {
  const auto n = static_cast<double>(bundle.Kperp.rows());
  if (omega.size() != bundle.Kperp.rows()) {
    throw validation_error("bootstrap_draw: multiplier length does not match the sample");
  }
  return omega.dot(bundle.Kperp * omega) / n;
}

namespace detail {
/// Stream id for bootstrap draw b; offset keeps bootstrap streams disjoint
/// from data-generation streams built on the same seed.
inline constexpr std::uint64_t bootstrap_stream = 0xb007u;
}  // namespace detail

/// B quadratic-form draws, one independent multiplier vector per draw.
inline std::vector<double> bootstrap(const gram_bundle& bundle, const bootstrap_config& cfg) {
  if (cfg.B == 0) throw validation_error("bootstrap: resample count must be positive");
  const auto n = static_cast<std::size_t>(bundle.Kperp.rows());
  std::vector<double> draws(cfg.B);
  parallel_for(cfg.B, cfg.threads, [&](std::size_t b) {
    rng_stream stream(cfg.seed, detail::bootstrap_stream, b);
    Eigen::VectorXd omega(n);
    if (cfg.multiplier == multiplier_kind::mammen) {
      for (std::size_t i = 0; i < n; ++i) omega[i] = stream.mammen();
    } else {
      for (std::size_t i = 0; i < n; ++i) omega[i] = stream.rademacher();
    }
    draws[b] = bootstrap_draw(bundle, omega);
  });
  return draws;
}

inline double p_value_from_draws(double stat, const std::vector<double>& draws) {
  std::size_t count = 0;
  for (double d : draws) count += (d >= stat);
  return static_cast<double>(1 + count) / static_cast<double>(draws.size() + 1);
}

/// End-to-end composite (or simple-null) test: fit, Gram, statistic,
/// bootstrap, p-value. Upstream failures carry a stage label.
inline test_result run_test(const observed_sample& s, std::shared_ptr<const family> fam,
                            const bootstrap_config& cfg, const test_options& opt = {}) {
  const auto stage = [](const char* name, const error& e) -> std::string {
    return std::string("[") + name + "] " + e.what();
  };

  try {
    validate_sample(s);
  } catch (const error& e) {
    throw validation_error(stage("validate", e));
  }

  test_result result;
  result.scheme = s.scheme;
  result.family = std::string(fam->name());
  result.n = s.n();
  result.multiplier = cfg.multiplier;
  result.seed = cfg.seed;
  result.rule = opt.rule;
  result.simple_null = opt.simple_null.has_value();

  fit_result fit;
  if (opt.simple_null) {
    result.theta_hat = *opt.simple_null;
  } else {
    try {
      fit = fit_mle(s, fam, std::nullopt, false, opt.engine);
    } catch (const error& e) {
      if (e.code() == errc::validation) throw validation_error(stage("fit", e));
      throw numeric_error(stage("fit", e));
    }
    result.theta_hat = fit.theta_hat;
    result.fit_converged = fit.converged;
    result.fit_iterations = fit.iterations;
    result.fit_grad_norm = fit.grad_norm;
  }

  gram_bundle bundle;
  try {
    const score_engine engine(s.scheme, fam, result.theta_hat, opt.engine);
    gram_options gopt;
    gopt.grid_size = opt.grid_size;
    gopt.rule = opt.rule;
    gopt.adapt_to_sample = opt.adapt_grid;
    gopt.kernel = opt.kernel;
    gopt.bmode = opt.bmode;
    bundle = opt.simple_null ? build_gram(engine, s, gopt)
                             : build_gram(engine, s, gopt, &fit.L, &fit.I_hat);
  } catch (const error& e) {
    if (e.code() == errc::validation) throw validation_error(stage("gram", e));
    throw numeric_error(stage("gram", e));
  }
  result.grid_size = bundle.grid.size();

  try {
    result.stat_nQ = statistic(bundle);
    result.stat_unprojected = bundle.Kg.sum() / static_cast<double>(result.n);
    result.boot_draws = bootstrap(bundle, cfg);
    result.p_value = p_value_from_draws(result.stat_nQ, result.boot_draws);
  } catch (const error& e) {
    if (e.code() == errc::validation) throw validation_error(stage("bootstrap", e));
    throw numeric_error(stage("bootstrap", e));
  }
  return result;
}

/// Empirical quantile of the bootstrap draws (sorted copy, nearest-rank).
inline double boot_quantile(std::vector<double> draws, double q) {
  if (draws.empty()) throw validation_error("boot_quantile: no draws");
  std::sort(draws.begin(), draws.end());
  const double pos = q * static_cast<double>(draws.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, draws.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return draws[lo] * (1.0 - frac) + draws[hi] * frac;
}

}  // namespace orthofit
