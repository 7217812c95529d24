// Error types carrying numeric diagnostics alongside the message.
#pragma once

#include <stdexcept>
#include <string>

namespace qsc {

// Inversion rejected: reciprocal condition estimate fell below the floor.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(const std::string& what, double rcond)
        : std::runtime_error(what), rcond_(rcond) {}
    double rcond() const { return rcond_; }

private:
    double rcond_;
};

// A series or fixed-point method needs a contraction; carries the offending norm.
class NonContractiveError : public std::runtime_error {
public:
    NonContractiveError(const std::string& what, double norm)
        : std::runtime_error(what), norm_(norm) {}
    double norm() const { return norm_; }

private:
    double norm_;
};

// Quadrature or ODE refinement failed to reach tolerance; carries the best estimate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double estimate)
        : std::runtime_error(what), estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

}  // namespace qsc
