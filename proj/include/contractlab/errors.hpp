#pragma once

#include <stdexcept>
#include <string>

namespace contractlab {

// Raised when an input value breaks a documented precondition (malformed
// file, non-stochastic row, negative cost, dimension mismatch, ...).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an enumeration would exceed a configured cardinality cap.
// Callers are expected to either raise the cap or coarsen the request;
// the library never silently truncates.
struct ResourceCapError : std::runtime_error {
    explicit ResourceCapError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace contractlab
