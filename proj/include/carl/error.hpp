#pragma once

#include <stdexcept>
#include <string>

namespace carl {

struct invalid_parameter : std::runtime_error {
  explicit invalid_parameter(const std::string& what) : std::runtime_error(what) {}
};

// Step-size underflow or other solver failure; carries the time at which
// integration could not continue.
struct integration_error : std::runtime_error {
  integration_error(const std::string& what, double t)
      : std::runtime_error(what + " at t = " + std::to_string(t) + " s"),
        failure_time(t) {}
  double failure_time;
};

struct config_error : std::runtime_error {
  config_error(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")"
                                    : what),
        line_number(line) {}
  int line_number;
};

}  // namespace carl
