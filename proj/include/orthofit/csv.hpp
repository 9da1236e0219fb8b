#pragma once

/// CSV ingestion for the per-scheme data layouts. Every layout is a plain
/// comma-separated file with a mandatory header row:
///   complete / complete-hazard : x
///   ltrc                        : y,u,delta
///   dt                          : x,u,v
///   cs                          : delta,c
/// Columns may appear in any order; unknown columns are rejected. Parse and
/// domain errors carry 1-based data-row numbers (the header is row 0).

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "orthofit/error.hpp"
#include "orthofit/sample.hpp"

namespace orthofit {
namespace detail {

inline std::string trim(std::string s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

inline double parse_number(const std::string& tok, std::size_t row, const std::string& col,
                           const std::string& origin) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || tok.empty()) {
    throw validation_error(origin + ": row " + std::to_string(row) + ", column '" + col +
                           "': cannot parse '" + tok + "' as a number");
  }
  return value;
}

inline std::uint8_t parse_indicator(const std::string& tok, std::size_t row,
                                    const std::string& col, const std::string& origin) {
  const double value = parse_number(tok, row, col, origin);
  if (value == 0.0) return 0;
  if (value == 1.0) return 1;
  throw validation_error(origin + ": row " + std::to_string(row) + ", column '" + col +
                         "': expected 0 or 1, got '" + tok + "'");
}

}  // namespace detail

/// Read a sample in the given scheme's layout. `origin` labels error messages
/// (usually the file path).
inline observed_sample sample_from_csv(std::istream& in, scheme_id scheme,
                                       const std::string& origin = "<input>") {
  std::vector<std::string> expected;
  switch (scheme) {
    case scheme_id::complete:
    case scheme_id::complete_hazard: expected = {"x"}; break;
    case scheme_id::ltrc: expected = {"y", "u", "delta"}; break;
    case scheme_id::double_trunc: expected = {"x", "u", "v"}; break;
    case scheme_id::current_status: expected = {"delta", "c"}; break;
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw validation_error(origin + ": empty file (expected a header row)");
  }
  const auto header = detail::split_csv_line(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].empty()) {
      throw validation_error(origin + ": header has an empty column name");
    }
    if (!index.emplace(header[i], i).second) {
      throw validation_error(origin + ": duplicate header column '" + header[i] + "'");
    }
  }
  for (const auto& name : expected) {
    if (!index.count(name)) {
      std::string want;
      for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
      throw validation_error(origin + ": missing column '" + name + "' (scheme " +
                             std::string(scheme_name(scheme)) + " expects header " + want + ")");
    }
  }
  for (const auto& [name, _] : index) {
    bool known = false;
    for (const auto& e : expected) known = known || (e == name);
    if (!known) {
      throw validation_error(origin + ": unexpected column '" + name + "' for scheme " +
                             std::string(scheme_name(scheme)));
    }
  }

  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw validation_error(origin + ": row " + std::to_string(rows.size() + 1) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
    }
    rows.push_back(std::move(fields));
  }

  auto numeric_column = [&](const std::string& name) {
    std::vector<double> col(rows.size());
    const std::size_t j = index.at(name);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      col[i] = detail::parse_number(rows[i][j], i + 1, name, origin);
    }
    return col;
  };
  auto indicator_column = [&](const std::string& name) {
    std::vector<std::uint8_t> col(rows.size());
    const std::size_t j = index.at(name);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      col[i] = detail::parse_indicator(rows[i][j], i + 1, name, origin);
    }
    return col;
  };

  observed_sample sample;
  switch (scheme) {
    case scheme_id::complete:
      sample = observed_sample::complete(numeric_column("x"));
      break;
    case scheme_id::complete_hazard:
      sample = observed_sample::complete_hazard(numeric_column("x"));
      break;
    case scheme_id::ltrc:
      sample = observed_sample::ltrc(numeric_column("y"), numeric_column("u"),
                                     indicator_column("delta"));
      break;
    case scheme_id::double_trunc:
      sample = observed_sample::double_trunc(numeric_column("x"), numeric_column("u"),
                                             numeric_column("v"));
      break;
    case scheme_id::current_status:
      sample = observed_sample::current_status(indicator_column("delta"), numeric_column("c"));
      break;
  }

  try {
    validate_sample(sample);
  } catch (const error& e) {
    throw validation_error(origin + ": " + e.what());
  }
  return sample;
}

inline observed_sample sample_from_csv(const std::string& path, scheme_id scheme) {
  std::ifstream in(path);
  if (!in) {
    throw missing_data_error("cannot open data file '" + path + "'");
  }
  return sample_from_csv(in, scheme, path);
}

}  // namespace orthofit
