#pragma once

/// Data-generating processes and the Monte Carlo study runner.
///
/// Two studies are provided, both testing the exponential null against
/// Gamma(theta, 1) data (theta = 1 recovers the null):
///   * dt               — doubly truncated observation, U ~ Exp(1) - nu,
///                        V = U + 3 + nu, keeping U <= X <= V (rejection
///                        sampling; the truncation proportion pt is reported);
///   * random-sampling  — complete observation, run with both indicator
///                        classes (hazard form and cdf form) side by side.
///
/// Every trial draws from its own counter-based RNG stream keyed by
/// (seed, cell, trial), so any single trial is reproducible in isolation and
/// results are independent of scheduling.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "orthofit/error.hpp"
#include "orthofit/family.hpp"
#include "orthofit/goftest.hpp"
#include "orthofit/parallel.hpp"
#include "orthofit/rng.hpp"
#include "orthofit/sample.hpp"

namespace orthofit {

enum class study_kind { dt, random_sampling };

inline study_kind parse_study(std::string_view s) {
  if (s == "dt") return study_kind::dt;
  if (s == "random-sampling" || s == "rs") return study_kind::random_sampling;
  throw validation_error("unknown study '" + std::string(s) +
                         "' (expected dt or random-sampling)");
}

inline std::string_view study_name(study_kind k) {
  return k == study_kind::dt ? "dt" : "random-sampling";
}

struct sim_config {
  study_kind study = study_kind::dt;
  std::vector<double> theta_grid = {0.5, 0.8, 1.0, 1.2, 1.5};
  double nu = 1.0;  // truncation strength (dt study): 1 = weak, 0.5 = strong
  std::vector<std::size_t> n_grid = {50, 100, 200};
  std::size_t trials_null = 300;  // theta = 1 cells
  std::size_t trials_alt = 200;   // all other theta
  std::size_t B = 199;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;
  std::size_t grid_size = 256;
  grid_rule rule = grid_rule::gauss_legendre;
  multiplier_kind multiplier = multiplier_kind::mammen;

  void validate() const {
    if (theta_grid.empty()) throw validation_error("simulation: empty theta grid");
    for (double th : theta_grid) {
      if (!(th > 0.0)) throw validation_error("simulation: theta values must be positive");
    }
    if (n_grid.empty()) throw validation_error("simulation: empty n grid");
    for (std::size_t n : n_grid) {
      if (n < 2) throw validation_error("simulation: sample sizes must be at least 2");
    }
    if (!(nu > 0.0)) throw validation_error("simulation: nu must be positive");
    if (trials_null == 0 || trials_alt == 0) {
      throw validation_error("simulation: trial counts must be positive");
    }
    if (B == 0) throw validation_error("simulation: B must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw validation_error("simulation: alpha must lie in (0, 1)");
    }
  }
};

/// n iid Gamma(theta, 1) draws observed completely.
inline observed_sample gen_complete(double theta, std::size_t n, rng_stream& rng) {
  if (!(theta > 0.0)) throw validation_error("gen_complete: theta must be positive");
  std::vector<double> x(n);
  for (auto& v : x) v = rng.gamma(theta, 1.0);
  return observed_sample::complete(std::move(x));
}

struct dt_draws {
  observed_sample sample;
  double pt = 0.0;  // rejected / (rejected + accepted)
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Rejection-sample (X, U, V) with X ~ Gamma(theta, 1), U ~ Exp(1) - nu,
/// V = U + 3 + nu, keeping U <= X <= V until n triples are accepted.
/// Rejected triples are discarded and redrawn jointly.
inline dt_draws gen_double_trunc(double theta, double nu, std::size_t n, rng_stream& rng) {
  if (!(theta > 0.0)) throw validation_error("gen_double_trunc: theta must be positive");
  if (!(nu > 0.0)) throw validation_error("gen_double_trunc: nu must be positive");
  std::vector<double> x, u, v;
  x.reserve(n);
  u.reserve(n);
  v.reserve(n);
  std::size_t accepted = 0, rejected = 0;
  while (accepted < n) {
    const double xi = rng.gamma(theta, 1.0);
    const double ui = rng.exponential(1.0) - nu;
    const double vi = ui + 3.0 + nu;
    if (ui <= xi && xi <= vi) {
      x.push_back(xi);
      u.push_back(ui);
      v.push_back(vi);
      ++accepted;
    } else {
      ++rejected;
    }
    const std::size_t attempts = accepted + rejected;
    if (attempts >= 20000 &&
        static_cast<double>(accepted) < 1e-4 * static_cast<double>(attempts)) {
      std::ostringstream os;
      os << "runaway truncation: acceptance rate below 1e-4 after " << attempts
         << " attempts (theta=" << theta << ", nu=" << nu << ")";
      throw numeric_error(os.str());
    }
  }
  dt_draws out{observed_sample::double_trunc(std::move(x), std::move(u), std::move(v)),
               0.0, accepted, rejected};
  out.pt = static_cast<double>(rejected) / static_cast<double>(rejected + accepted);
  return out;
}

/// One table cell: a (variant, theta, n) triple with a stable id used for
/// seed splitting.
struct cell_spec {
  scheme_id scheme = scheme_id::double_trunc;
  double theta = 1.0;
  std::size_t n = 0;
  std::uint64_t id = 0;
};

/// Canonical cell enumeration: variants outermost, then theta, then n.
/// Ids are sequential in that order, so a cell is addressable from the
/// config alone.
inline std::vector<cell_spec> enumerate_cells(const sim_config& cfg) {
  std::vector<scheme_id> variants;
  if (cfg.study == study_kind::dt) {
    variants = {scheme_id::double_trunc};
  } else {
    variants = {scheme_id::complete_hazard, scheme_id::complete};
  }
  std::vector<cell_spec> cells;
  std::uint64_t id = 0;
  for (scheme_id sc : variants) {
    for (double theta : cfg.theta_grid) {
      for (std::size_t n : cfg.n_grid) {
        cells.push_back({sc, theta, n, id++});
      }
    }
  }
  return cells;
}

struct trial_outcome {
  bool failed = false;
  std::string what;
  double p_value = 1.0;
  double pt = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Run trial `t` of cell `cell` in isolation. All randomness flows from
/// split_seed(cfg.seed, cell.id, t): generation uses stream 0 of the derived
/// seed and the bootstrap its own reserved stream, so the two never collide.
inline trial_outcome run_trial(const sim_config& cfg, const cell_spec& cell, std::size_t t) {
  const std::uint64_t tseed = split_seed(cfg.seed, cell.id, t);
  trial_outcome out;
  try {
    rng_stream gen(tseed, 0, 0);
    observed_sample sample = [&] {
      if (cell.scheme == scheme_id::double_trunc) {
        dt_draws d = gen_double_trunc(cell.theta, cfg.nu, cell.n, gen);
        out.pt = d.pt;
        out.accepted = d.accepted;
        out.rejected = d.rejected;
        return std::move(d.sample);
      }
      observed_sample s = gen_complete(cell.theta, cell.n, gen);
      s.scheme = cell.scheme;  // complete vs complete-hazard variant
      return s;
    }();

    bootstrap_config bc;
    bc.B = cfg.B;
    bc.multiplier = cfg.multiplier;
    bc.seed = tseed;
    bc.threads = 1;  // trials are the parallel unit

    test_options topt;
    topt.grid_size = cfg.grid_size;
    topt.rule = cfg.rule;

    const auto fam = make_family("exponential");
    out.p_value = run_test(sample, fam, bc, topt).p_value;
  } catch (const error& e) {
    out.failed = true;
    out.what = e.what();
  }
  return out;
}

struct sim_cell_result {
  std::string variant;  // scheme name of the statistic variant
  double theta = 1.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double reject = 0.0;  // proportion of successful trials with p <= alpha
  double se = 0.0;      // sqrt(reject (1 - reject) / successes)
  double pt = 0.0;      // pooled truncation proportion (dt study only)
  double seconds = 0.0;
  std::vector<double> p_values;  // successful trials, in trial order
};

struct sim_report {
  sim_config config;
  std::vector<sim_cell_result> cells;
};

/// Run every cell of the configured study. Individual trial failures are
/// tolerated up to a 1% per-cell budget (minimum one trial) and excluded from
/// the rejection proportion; beyond the budget the study aborts.
inline sim_report run_study(const sim_config& cfg) {
  cfg.validate();
  sim_report report;
  report.config = cfg;
  const auto cells = enumerate_cells(cfg);
  for (const auto& cell : cells) {
    const std::size_t trials = (cell.theta == 1.0) ? cfg.trials_null : cfg.trials_alt;
    std::vector<trial_outcome> outcomes(trials);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(trials, cfg.threads,
                 [&](std::size_t t) { outcomes[t] = run_trial(cfg, cell, t); });
    const auto t1 = std::chrono::steady_clock::now();

    sim_cell_result res;
    res.variant = std::string(scheme_name(cell.scheme));
    res.theta = cell.theta;
    res.n = cell.n;
    res.trials = trials;
    res.seconds = std::chrono::duration<double>(t1 - t0).count();

    std::size_t rejections = 0, accepted = 0, rejected_draws = 0;
    std::string last_failure;
    for (const auto& o : outcomes) {
      if (o.failed) {
        ++res.failures;
        last_failure = o.what;
        continue;
      }
      res.p_values.push_back(o.p_value);
      rejections += (o.p_value <= cfg.alpha);
      accepted += o.accepted;
      rejected_draws += o.rejected;
    }
    const std::size_t budget = std::max<std::size_t>(1, trials / 100);
    if (res.failures > budget) {
      std::ostringstream os;
      os << "study cell (variant=" << res.variant << ", theta=" << res.theta
         << ", n=" << res.n << "): " << res.failures << " of " << trials
         << " trials failed, exceeding the 1% budget; last error: " << last_failure;
      throw numeric_error(os.str());
    }
    const std::size_t successes = trials - res.failures;
    res.reject = static_cast<double>(rejections) / static_cast<double>(successes);
    res.se = std::sqrt(res.reject * (1.0 - res.reject) / static_cast<double>(successes));
    if (accepted + rejected_draws > 0) {
      res.pt = static_cast<double>(rejected_draws) /
               static_cast<double>(accepted + rejected_draws);
    }
    report.cells.push_back(std::move(res));
  }
  return report;
}

/// Kolmogorov distance of a p-value batch from the uniform law on [0, 1];
/// used to sanity-check null calibration.
inline double ks_uniform_distance(std::vector<double> p) {
  if (p.empty()) throw validation_error("ks_uniform_distance: empty batch");
  std::sort(p.begin(), p.end());
  const auto n = static_cast<double>(p.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - p[i]);
    d = std::max(d, p[i] - static_cast<double>(i) / n);
  }
  return d;
}

/// Wide CSV mirroring the study tables: one row per (variant, theta) with the
/// pooled truncation proportion and per-n rejection, standard-error, and
/// failure columns.
inline void write_table_csv(const sim_report& report, std::ostream& os) {
  const auto& cfg = report.config;
  os << "study,variant,theta,pt";
  for (std::size_t n : cfg.n_grid) os << ",reject_n" << n << ",se_n" << n << ",fail_n" << n;
  os << "\n";
  os.precision(6);
  // Rows follow the cell enumeration: cells arrive grouped by (variant, theta).
  for (std::size_t i = 0; i < report.cells.size(); i += cfg.n_grid.size()) {
    const auto* row = &report.cells[i];
    // pt does not depend on n, so pool the per-n estimates across the row,
    // weighting by trial count.
    double pt = 0.0;
    std::size_t pt_trials = 0;
    for (std::size_t j = 0; j < cfg.n_grid.size(); ++j) {
      const auto& cell = report.cells[i + j];
      pt += cell.pt * static_cast<double>(cell.trials);
      pt_trials += cell.trials;
    }
    if (pt_trials > 0) pt /= static_cast<double>(pt_trials);
    os << study_name(cfg.study) << ',' << row->variant << ',' << row->theta << ',' << pt;
    for (std::size_t j = 0; j < cfg.n_grid.size(); ++j) {
      const auto& cell = report.cells[i + j];
      os << ',' << cell.reject << ',' << cell.se << ',' << cell.failures;
    }
    os << "\n";
  }
}

inline void write_table_csv(const sim_report& report, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw validation_error("cannot open output file '" + path + "'");
  write_table_csv(report, os);
}

}  // namespace orthofit
