#pragma once

/// Command-line front end. Three subcommands:
///   test      — run the goodness-of-fit test on a CSV file
///   simulate  — run a Monte Carlo study and write the rejection table
///   quasar    — the doubly truncated luminosity case study
/// Every subcommand accepts `--config file` with key=value lines (same keys
/// as the long flags, without dashes). Exit codes: 0 success, 2 validation
/// error, 3 numeric failure, 4 missing data.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orthofit/csv.hpp"
#include "orthofit/error.hpp"
#include "orthofit/family.hpp"
#include "orthofit/goftest.hpp"
#include "orthofit/quasar.hpp"
#include "orthofit/report.hpp"
#include "orthofit/simulate.hpp"

namespace orthofit {
namespace detail {

inline std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw validation_error(std::string(what) + ": cannot parse '" + tok + "' as a number");
    }
  }
  if (out.empty()) throw validation_error(std::string(what) + ": empty list");
  return out;
}

inline std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(text, what)) {
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw validation_error(std::string(what) + ": expected nonnegative integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// `--simple-null theta=v1[,v2]` (the `theta=` prefix is optional).
inline theta_vector parse_simple_null(std::string text) {
  text = trim(text);
  if (text.rfind("theta=", 0) == 0) text = text.substr(6);
  const auto vals = parse_double_list(text, "--simple-null");
  theta_vector theta(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) theta[static_cast<Eigen::Index>(i)] = vals[i];
  return theta;
}

inline void require_grid_size(std::size_t m) {
  if (m < 8) {
    throw validation_error("--grid-size must be at least 8, got " + std::to_string(m));
  }
}

/// Applies `key=value` lines from a config file to an already parsed
/// subcommand. Keys are the long flag names without dashes; values for flags
/// given on the command line are left alone, so explicit flags always win.
/// CLI11 only consults a config file registered on the root app, hence the
/// manual pass here.
inline void apply_config_file(CLI::App& cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("--config: cannot open '" + path + "'");
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto where = "--config: line " + std::to_string(lineno);
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw validation_error(where + ": expected key=value, got '" + text + "'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw validation_error(where + ": duplicate key '" + key + "'");
    }
    CLI::Option* opt = cmd.get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw validation_error(where + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value.empty() && opt->get_expected_min() == 0 ? "true" : value);
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw validation_error("--config: key '" + key + "': " + e.what());
    }
  }
}

struct common_flags {
  std::size_t B = 499;
  std::uint64_t seed = 0;
  std::size_t grid_size = 256;
  std::string grid_rule_str = "gl";
  std::string multiplier_str = "mammen";
  int threads = 0;
  std::string config_path;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--B", B, "Multiplier bootstrap resamples")->capture_default_str();
    cmd.add_option("--seed", seed, "Root RNG seed; all randomness derives from it")
        ->capture_default_str();
    cmd.add_option("--grid-size", grid_size, "Quadrature grid density (minimum 8)")
        ->capture_default_str();
    cmd.add_option("--grid-rule", grid_rule_str, "Quadrature rule: gl or mid")
        ->capture_default_str();
    cmd.add_option("--multiplier", multiplier_str, "Bootstrap multiplier: mammen or rademacher")
        ->capture_default_str();
    cmd.add_option("--threads", threads, "Worker threads (0 = hardware default)")
        ->capture_default_str();
    cmd.add_option("--config", config_path,
                   "Read options from a key=value file (explicit flags win)");
  }

  /// Call right after parse, before reading any of the bound values.
  void finish_parse(CLI::App& cmd) const {
    if (!config_path.empty()) apply_config_file(cmd, config_path);
  }

  void check_and_fill(bootstrap_config& bc) const {
    require_grid_size(grid_size);
    if (B == 0) throw validation_error("--B must be positive");
    bc.B = B;
    bc.seed = seed;
    bc.multiplier = parse_multiplier(multiplier_str);
    bc.threads = threads;
  }
};

}  // namespace detail

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"orthofit: goodness-of-fit tests for parametric models under incomplete data"};
  app.require_subcommand(1);

  // ---- test -------------------------------------------------------------
  auto* test_cmd = app.add_subcommand("test", "Test a parametric family on a data file");
  std::string t_scheme = "complete", t_family = "exponential", t_data;
  std::string t_simple_null, t_out, t_emit_draws;
  double t_alpha = 0.05;
  bool t_cs_weight = false;
  detail::common_flags t_common;
  test_cmd->add_option("--scheme", t_scheme,
                       "Observation scheme: complete, complete-hazard, ltrc, dt, cs")
      ->capture_default_str();
  test_cmd->add_option("--family", t_family, "Null family: exponential, gamma, weibull")
      ->capture_default_str();
  test_cmd->add_option("--data", t_data, "Input CSV (layout depends on --scheme)")->required();
  test_cmd->add_option("--alpha", t_alpha, "Level for the verdict line on stderr")
      ->capture_default_str();
  test_cmd->add_option("--simple-null", t_simple_null,
                       "Known parameter theta=v1[,v2]: skip estimation entirely");
  test_cmd->add_flag("--cs-weight", t_cs_weight,
                     "Variance-standardize the current-status indicator class");
  test_cmd->add_option("--out", t_out, "Write the JSON report here instead of stdout");
  test_cmd->add_option("--emit-boot-draws", t_emit_draws, "Write bootstrap draws CSV here");
  t_common.add_to(*test_cmd);

  // ---- simulate ---------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo study");
  std::string s_study = "dt", s_theta_grid = "0.5,0.8,1,1.2,1.5", s_n_grid = "50,100,200";
  std::string s_out;
  double s_nu = 1.0, s_alpha = 0.05;
  std::size_t s_trials = 300, s_trials_alt = 200;
  bool s_paper_scale = false;
  detail::common_flags s_common;
  s_common.B = 199;
  sim_cmd->add_option("--study", s_study, "Study: dt or random-sampling")->capture_default_str();
  sim_cmd->add_option("--nu", s_nu, "Truncation strength (dt study): 1 weak, 0.5 strong")
      ->capture_default_str();
  sim_cmd->add_option("--theta-grid", s_theta_grid, "Comma-separated shape values")
      ->capture_default_str();
  sim_cmd->add_option("--n-grid", s_n_grid, "Comma-separated sample sizes")
      ->capture_default_str();
  sim_cmd->add_option("--trials", s_trials, "Trials per null cell (theta = 1)")
      ->capture_default_str();
  sim_cmd->add_option("--trials-alt", s_trials_alt, "Trials per alternative cell")
      ->capture_default_str();
  sim_cmd->add_option("--alpha", s_alpha, "Rejection level")->capture_default_str();
  sim_cmd->add_flag("--paper-scale", s_paper_scale,
                    "Full-scale run: 1000/500 trials and B=499 (overrides those flags)");
  sim_cmd->add_option("--out", s_out, "Write the rejection table CSV here instead of stdout");
  s_common.add_to(*sim_cmd);

  // ---- quasar -----------------------------------------------------------
  auto* q_cmd = app.add_subcommand("quasar", "Doubly truncated luminosity case study");
  std::string q_data = "data/quasar.csv", q_out, q_emit_draws, q_emit_cdf;
  detail::common_flags q_common;
  q_cmd->add_option("--data", q_data, "Quasar CSV in the dt layout (header x,u,v)")
      ->capture_default_str();
  q_cmd->add_option("--out", q_out, "Write the JSON report here instead of stdout");
  q_cmd->add_option("--emit-boot-draws", q_emit_draws, "Write bootstrap draws CSV here");
  q_cmd->add_option("--emit-cdf", q_emit_cdf, "Write fitted/empirical cdf curves CSV here");
  q_common.add_to(*q_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(errc::validation);
  }

  try {
    if (*test_cmd) {
      t_common.finish_parse(*test_cmd);
      const scheme_id scheme = parse_scheme(t_scheme);
      const auto fam = make_family(t_family);
      const observed_sample sample = sample_from_csv(t_data, scheme);

      bootstrap_config bc;
      t_common.check_and_fill(bc);
      test_options topt;
      topt.grid_size = t_common.grid_size;
      topt.rule = parse_grid_rule(t_common.grid_rule_str);
      topt.engine.cs_weight = t_cs_weight;
      if (!t_simple_null.empty()) topt.simple_null = detail::parse_simple_null(t_simple_null);
      if (!(t_alpha > 0.0 && t_alpha < 1.0)) {
        throw validation_error("--alpha must lie in (0, 1)");
      }

      const test_result result = run_test(sample, fam, bc, topt);
      const test_report report = make_report(result);
      if (t_out.empty()) {
        write_report(report, std::cout);
      } else {
        write_report(report, t_out);
      }
      if (!t_emit_draws.empty()) write_boot_draws_csv(result, t_emit_draws);
      std::cerr << "nQ = " << result.stat_nQ << ", p = " << result.p_value << " ("
                << (result.p_value <= t_alpha ? "reject" : "fail to reject")
                << " at level " << t_alpha << ")\n";
      return 0;
    }

    if (*sim_cmd) {
      s_common.finish_parse(*sim_cmd);
      sim_config cfg;
      cfg.study = parse_study(s_study);
      cfg.theta_grid = detail::parse_double_list(s_theta_grid, "--theta-grid");
      cfg.nu = s_nu;
      cfg.n_grid = detail::parse_size_list(s_n_grid, "--n-grid");
      cfg.trials_null = s_trials;
      cfg.trials_alt = s_trials_alt;
      cfg.B = s_common.B;
      cfg.alpha = s_alpha;
      cfg.seed = s_common.seed;
      cfg.threads = s_common.threads;
      detail::require_grid_size(s_common.grid_size);
      cfg.grid_size = s_common.grid_size;
      cfg.rule = parse_grid_rule(s_common.grid_rule_str);
      cfg.multiplier = parse_multiplier(s_common.multiplier_str);
      if (s_paper_scale) {
        cfg.trials_null = 1000;
        cfg.trials_alt = 500;
        cfg.B = 499;
      }

      const sim_report report = run_study(cfg);
      if (s_out.empty()) {
        write_table_csv(report, std::cout);
      } else {
        write_table_csv(report, s_out);
      }
      double total = 0.0;
      for (const auto& cell : report.cells) total += cell.seconds;
      std::cerr << report.cells.size() << " cells in " << total << " s\n";
      return 0;
    }

    if (*q_cmd) {
      q_common.finish_parse(*q_cmd);
      quasar_options opt;
      opt.data_path = q_data;
      opt.B = q_common.B;
      opt.seed = q_common.seed;
      detail::require_grid_size(q_common.grid_size);
      opt.grid_size = q_common.grid_size;
      opt.rule = parse_grid_rule(q_common.grid_rule_str);
      opt.multiplier = parse_multiplier(q_common.multiplier_str);
      opt.threads = q_common.threads;
      if (opt.B == 0) throw validation_error("--B must be positive");

      const quasar_result result = run_quasar(opt);
      if (q_out.empty()) {
        write_report(result.report, std::cout);
      } else {
        write_report(result.report, q_out);
      }
      if (!q_emit_draws.empty()) write_boot_draws_csv(result.test, q_emit_draws);
      if (!q_emit_cdf.empty()) {
        write_cdf_csv(result.sample, *make_family("exponential"), result.test.theta_hat,
                      q_emit_cdf);
      }
      std::cerr << "n = " << result.test.n << ", shift = " << result.shift
                << ", theta_hat = " << result.test.theta_hat[0]
                << ", nQ = " << result.test.stat_nQ << ", p = " << result.test.p_value << "\n";
      return 0;
    }
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(errc::numeric);
  }
  return 0;
}

/// Convenience overload for in-process tests: argv without the program name.
inline int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("orthofit");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(storage.size());
  for (const auto& s : storage) argv.push_back(s.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace orthofit
