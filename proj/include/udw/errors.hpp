// errors.hpp — exception types shared by the udw library and CLI
#pragma once

#include <stdexcept>
#include <string>

namespace udw {

// Argument outside the mathematical domain of a function (e.g. Ei at x = 0)
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Result not representable in double precision
struct OverflowError : std::overflow_error {
    explicit OverflowError(const std::string& what) : std::overflow_error(what) {}
};

// Violated precondition on parameters, grids or step sizes
struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// Iterative or adaptive numerical procedure failed to converge
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace udw
