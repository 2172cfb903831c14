#include "fraclb/errors.hpp"

namespace fraclb {

Error::Error(std::string module, const std::string& message)
    : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

QuadratureWindowError::QuadratureWindowError(std::string module, const std::string& message)
    : Error(std::move(module), "quadrature window: " + message) {}

}  // namespace fraclb
