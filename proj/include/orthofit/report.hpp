#pragma once

/// JSON test reports. The schema echoes the full effective configuration so
/// any run can be reproduced from its report alone:
///   scheme, family, n, theta_hat (array), simple_null, stat_nQ, p_value,
///   B, seed, grid_size, grid_rule, multiplier,
///   boot_quantiles: {"0.90": q90, "0.95": q95, "0.99": q99}
/// Serialization round-trips exactly (shortest-round-trip doubles).

#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "orthofit/error.hpp"
#include "orthofit/goftest.hpp"
#include "orthofit/quadrature.hpp"
#include "orthofit/sample.hpp"

namespace orthofit {

struct test_report {
  std::string scheme;
  std::string family;
  std::size_t n = 0;
  std::vector<double> theta_hat;
  bool simple_null = false;
  double stat_nQ = 0.0;
  double p_value = 1.0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
  std::size_t grid_size = 0;
  std::string grid_rule;
  std::string multiplier;
  std::map<std::string, double> boot_quantiles;

  bool operator==(const test_report&) const = default;
};

inline test_report make_report(const test_result& r) {
  test_report rep;
  rep.scheme = std::string(scheme_name(r.scheme));
  rep.family = r.family;
  rep.n = r.n;
  rep.theta_hat.assign(r.theta_hat.data(), r.theta_hat.data() + r.theta_hat.size());
  rep.simple_null = r.simple_null;
  rep.stat_nQ = r.stat_nQ;
  rep.p_value = r.p_value;
  rep.B = r.boot_draws.size();
  rep.seed = r.seed;
  rep.grid_size = r.grid_size;
  rep.grid_rule = std::string(grid_rule_name(r.rule));
  rep.multiplier = std::string(multiplier_name(r.multiplier));
  for (const char* q : {"0.90", "0.95", "0.99"}) {
    rep.boot_quantiles[q] = boot_quantile(r.boot_draws, std::stod(q));
  }
  return rep;
}

inline nlohmann::json to_json(const test_report& r) {
  return nlohmann::json{
      {"scheme", r.scheme},
      {"family", r.family},
      {"n", r.n},
      {"theta_hat", r.theta_hat},
      {"simple_null", r.simple_null},
      {"stat_nQ", r.stat_nQ},
      {"p_value", r.p_value},
      {"B", r.B},
      {"seed", r.seed},
      {"grid_size", r.grid_size},
      {"grid_rule", r.grid_rule},
      {"multiplier", r.multiplier},
      {"boot_quantiles", r.boot_quantiles},
  };
}

inline test_report report_from_json(const nlohmann::json& j) {
  test_report r;
  try {
    j.at("scheme").get_to(r.scheme);
    j.at("family").get_to(r.family);
    j.at("n").get_to(r.n);
    j.at("theta_hat").get_to(r.theta_hat);
    j.at("simple_null").get_to(r.simple_null);
    j.at("stat_nQ").get_to(r.stat_nQ);
    j.at("p_value").get_to(r.p_value);
    j.at("B").get_to(r.B);
    j.at("seed").get_to(r.seed);
    j.at("grid_size").get_to(r.grid_size);
    j.at("grid_rule").get_to(r.grid_rule);
    j.at("multiplier").get_to(r.multiplier);
    j.at("boot_quantiles").get_to(r.boot_quantiles);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed report JSON: ") + e.what());
  }
  return r;
}

inline void write_report(const test_report& r, std::ostream& os) {
  os << to_json(r).dump(2) << "\n";
}

inline void write_report(const test_report& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw validation_error("cannot open output file '" + path + "'");
  write_report(r, os);
}

inline test_report read_report(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed report JSON: ") + e.what());
  }
  return report_from_json(j);
}

inline test_report read_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw missing_data_error("cannot open report file '" + path + "'");
  return read_report(is);
}

}  // namespace orthofit
