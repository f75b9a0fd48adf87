#pragma once

#include <stdexcept>
#include <string>

namespace kuramoto2c {

// Thrown when a requested object (root, boundary element, ...) does not
// exist inside the search domain. Distinct from a precondition violation,
// which raises std::domain_error.
struct not_found_error : std::runtime_error {
  explicit not_found_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when the table-based classification disagrees with the enumerated
// solution count. Surfaces numerical trouble instead of hiding it.
struct inconsistency_error : std::runtime_error {
  explicit inconsistency_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown by the integrator when the time step produces non-finite state.
struct step_size_error : std::runtime_error {
  explicit step_size_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace kuramoto2c
