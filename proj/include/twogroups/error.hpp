#pragma once

#include <stdexcept>
#include <string>

namespace twogroups {

// Raised when a parameter lies outside its admissible domain.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised by threshold searches that have no finite solution (e.g. BFDR with p = 0).
class NoThresholdError : public std::domain_error {
public:
    explicit NoThresholdError(const std::string& what) : std::domain_error(what) {}
};

// Raised when an MCMC chain reaches a non-finite log posterior.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace twogroups
