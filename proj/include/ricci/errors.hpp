#pragma once

#include <stdexcept>
#include <string>

namespace ricci {

/// Numerical failure during a computation (as opposed to a precondition
/// violation, which is reported as std::invalid_argument).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Pole-limit evaluation failed (e.g. |h_r| at a pole below tolerance, or a
/// potential whose radial derivative does not vanish at a pole).
class PoleRegularizationError : public NumericalError {
public:
    explicit PoleRegularizationError(const std::string& what) : NumericalError(what) {}
};

/// ODE state left the finite range; carries the last radius that was valid.
class BlowupError : public NumericalError {
public:
    BlowupError(const std::string& what, double last_valid_r_)
        : NumericalError(what), last_valid_r(last_valid_r_) {}
    double last_valid_r;
};

/// Time-stepping failure; carries the time at which the step was rejected.
class StepError : public NumericalError {
public:
    StepError(const std::string& what, double t_) : NumericalError(what), t(t_) {}
    double t;
};

/// Abscissae expected to be strictly increasing were not.
class NonMonotoneError : public NumericalError {
public:
    NonMonotoneError() : NumericalError("abscissae are not strictly increasing") {}
};

} // namespace ricci
