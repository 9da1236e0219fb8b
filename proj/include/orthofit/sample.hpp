#pragma once

/// Observation-scheme data containers. A sample is a column-oriented table
/// whose active columns depend on the scheme:
///   complete / complete-hazard : x
///   ltrc                        : y, u, delta   (requires u <= y)
///   dt (double truncation)      : x, u, v       (requires u <= x <= v)
///   cs (current status)         : delta, c      (delta in {0,1})

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "orthofit/error.hpp"

namespace orthofit {

enum class scheme_id {
  complete,
  complete_hazard,
  ltrc,
  double_trunc,
  current_status,
};

inline scheme_id parse_scheme(std::string_view s) {
  if (s == "complete") return scheme_id::complete;
  if (s == "complete-hazard") return scheme_id::complete_hazard;
  if (s == "ltrc") return scheme_id::ltrc;
  if (s == "dt") return scheme_id::double_trunc;
  if (s == "cs") return scheme_id::current_status;
  throw validation_error("unknown scheme '" + std::string(s) +
                         "' (expected complete, complete-hazard, ltrc, dt, or cs)");
}

inline std::string_view scheme_name(scheme_id s) {
  switch (s) {
    case scheme_id::complete: return "complete";
    case scheme_id::complete_hazard: return "complete-hazard";
    case scheme_id::ltrc: return "ltrc";
    case scheme_id::double_trunc: return "dt";
    case scheme_id::current_status: return "cs";
  }
  return "?";
}

struct observed_sample {
  scheme_id scheme = scheme_id::complete;
  std::vector<double> x;  // complete, complete-hazard, dt
  std::vector<double> y;  // ltrc
  std::vector<double> u;  // ltrc, dt
  std::vector<double> v;  // dt
  std::vector<double> c;  // cs
  std::vector<std::uint8_t> delta;  // ltrc, cs

  std::size_t n() const noexcept {
    switch (scheme) {
      case scheme_id::complete:
      case scheme_id::complete_hazard:
      case scheme_id::double_trunc: return x.size();
      case scheme_id::ltrc: return y.size();
      case scheme_id::current_status: return c.size();
    }
    return 0;
  }

  static observed_sample complete(std::vector<double> xs) {
    observed_sample s;
    s.scheme = scheme_id::complete;
    s.x = std::move(xs);
    return s;
  }
  static observed_sample complete_hazard(std::vector<double> xs) {
    observed_sample s;
    s.scheme = scheme_id::complete_hazard;
    s.x = std::move(xs);
    return s;
  }
  static observed_sample ltrc(std::vector<double> ys, std::vector<double> us,
                              std::vector<std::uint8_t> deltas) {
    observed_sample s;
    s.scheme = scheme_id::ltrc;
    s.y = std::move(ys);
    s.u = std::move(us);
    s.delta = std::move(deltas);
    return s;
  }
  static observed_sample double_trunc(std::vector<double> xs, std::vector<double> us,
                                      std::vector<double> vs) {
    observed_sample s;
    s.scheme = scheme_id::double_trunc;
    s.x = std::move(xs);
    s.u = std::move(us);
    s.v = std::move(vs);
    return s;
  }
  static observed_sample current_status(std::vector<std::uint8_t> deltas, std::vector<double> cs) {
    observed_sample s;
    s.scheme = scheme_id::current_status;
    s.delta = std::move(deltas);
    s.c = std::move(cs);
    return s;
  }

  /// Mean of the outcome column (x, y, or c), used to seed the MLE.
  double outcome_mean() const {
    const std::vector<double>* col = nullptr;
    switch (scheme) {
      case scheme_id::complete:
      case scheme_id::complete_hazard:
      case scheme_id::double_trunc: col = &x; break;
      case scheme_id::ltrc: col = &y; break;
      case scheme_id::current_status: col = &c; break;
    }
    double sum = 0.0;
    for (double val : *col) sum += val;
    return col->empty() ? 0.0 : sum / static_cast<double>(col->size());
  }
};

namespace detail {
inline void require_finite(const std::vector<double>& col, const char* colname,
                           std::vector<std::string>& problems) {
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (!std::isfinite(col[i])) {
      problems.push_back("row " + std::to_string(i + 1) + ": non-finite " + colname);
    }
  }
}
}  // namespace detail

/// Check scheme invariants, collecting every violation with its row number
/// (1-based, matching the data rows of the CSV layouts).
inline void validate_sample(const observed_sample& s) {
  std::vector<std::string> problems;
  const std::size_t n = s.n();
  if (n < 2) problems.push_back("sample must contain at least 2 rows, got " + std::to_string(n));

  auto require_size = [&](const auto& col, const char* colname) {
    if (col.size() != n) {
      problems.push_back(std::string("column ") + colname + " has " + std::to_string(col.size()) +
                         " values, expected " + std::to_string(n));
      return false;
    }
    return true;
  };

  switch (s.scheme) {
    case scheme_id::complete:
    case scheme_id::complete_hazard:
      detail::require_finite(s.x, "x", problems);
      break;
    case scheme_id::ltrc:
      if (require_size(s.u, "u") && require_size(s.delta, "delta")) {
        detail::require_finite(s.y, "y", problems);
        detail::require_finite(s.u, "u", problems);
        for (std::size_t i = 0; i < n; ++i) {
          if (s.u[i] > s.y[i]) {
            problems.push_back("row " + std::to_string(i + 1) + ": u > y violates left truncation");
          }
          if (s.delta[i] > 1) {
            problems.push_back("row " + std::to_string(i + 1) + ": delta must be 0 or 1");
          }
        }
      }
      break;
    case scheme_id::double_trunc:
      if (require_size(s.u, "u") && require_size(s.v, "v")) {
        detail::require_finite(s.x, "x", problems);
        detail::require_finite(s.u, "u", problems);
        detail::require_finite(s.v, "v", problems);
        for (std::size_t i = 0; i < n; ++i) {
          if (!(s.u[i] <= s.x[i] && s.x[i] <= s.v[i])) {
            problems.push_back("row " + std::to_string(i + 1) +
                               ": requires u <= x <= v under double truncation");
          }
        }
      }
      break;
    case scheme_id::current_status:
      if (require_size(s.delta, "delta")) {
        detail::require_finite(s.c, "c", problems);
        for (std::size_t i = 0; i < n; ++i) {
          if (s.delta[i] > 1) {
            problems.push_back("row " + std::to_string(i + 1) + ": delta must be 0 or 1");
          }
          if (!(s.c[i] >= 0.0)) {
            problems.push_back("row " + std::to_string(i + 1) +
                               ": inspection time c outside the family support");
          }
        }
      }
      break;
  }

  if (!problems.empty()) {
    std::string msg = "invalid sample (" + std::to_string(problems.size()) + " problem(s)):";
    std::size_t shown = 0;
    for (const auto& p : problems) {
      msg += "\n  " + p;
      if (++shown == 20 && problems.size() > 20) {
        msg += "\n  ... and " + std::to_string(problems.size() - 20) + " more";
        break;
      }
    }
    throw validation_error(msg);
  }
}

}  // namespace orthofit
