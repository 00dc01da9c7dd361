#pragma once

#include <stdexcept>
#include <string>

namespace mlife {

// Raised when a rate, payment or reserve evaluates to a non-finite value.
// The message names the offending time/state so the failure is locatable.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed or inconsistent configuration input.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mlife
