#pragma once

#include <stdexcept>
#include <string>

namespace agglo {

// Raised when caller-supplied input breaks a documented precondition.
// The CLI maps it to exit code 1; every other exception maps to 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace agglo
