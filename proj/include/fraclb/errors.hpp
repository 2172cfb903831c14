#pragma once

#include <stdexcept>
#include <string>

namespace fraclb {

// Every failure raised by the library names the module that detected it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message);
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Raised when a time-quadrature window cannot resolve the integrand.
// Callers may catch it separately and continue with a diagnostic.
class QuadratureWindowError : public Error {
 public:
  QuadratureWindowError(std::string module, const std::string& message);
};

}  // namespace fraclb
