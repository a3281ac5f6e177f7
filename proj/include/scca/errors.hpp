#pragma once

#include <stdexcept>
#include <string>

namespace scca {

// Thrown when a linear-algebra step fails beyond the jitter retry policy
// (lost positive definiteness, singular system, too many aborted iterations).
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File-system / parse failures surfaced by the CSV and JSON layers.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace scca
