#pragma once

#include <stdexcept>
#include <string>

namespace orthofit {

/// Error categories with stable process exit codes:
/// validation (bad input, malformed files, inadmissible parameters) -> 2,
/// numeric (non-convergence, degenerate windows, saturation)        -> 3,
/// missing_data (required input file absent)                        -> 4.
enum class errc : int {
  validation = 2,
  numeric = 3,
  missing_data = 4,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  errc code_;
};

struct validation_error : error {
  explicit validation_error(const std::string& what) : error(errc::validation, what) {}
};

struct numeric_error : error {
  explicit numeric_error(const std::string& what) : error(errc::numeric, what) {}
};

struct missing_data_error : error {
  explicit missing_data_error(const std::string& what) : error(errc::missing_data, what) {}
};

}  // namespace orthofit
