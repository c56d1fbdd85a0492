#pragma once

#include <stdexcept>
#include <string>

namespace nplap {

/// Argument outside the mathematical or supported numerical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative procedure (zero search, bisection, eigen iteration) did not converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid discrete geometry: empty or disconnected mask, broken symmetry, etc.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nplap
