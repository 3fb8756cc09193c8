#pragma once

#include <stdexcept>
#include <string>

namespace stablehit {

// Parameter or argument outside the supported domain.
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// A quadrature or iteration budget was exhausted before the tolerance was met,
// or an integral was detected to diverge.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

// The integrand produced NaN or infinity at an interior evaluation point.
class nan_error : public std::runtime_error {
public:
    explicit nan_error(const std::string& what) : std::runtime_error(what) {}
};

// Request for a value that is only defined as one-sided limits (G at 0).
class boundary_value_error : public std::domain_error {
public:
    explicit boundary_value_error(const std::string& what) : std::domain_error(what) {}
};

// Candidate-constant calibration could not single out one candidate.
class calibration_error : public std::runtime_error {
public:
    explicit calibration_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stablehit
