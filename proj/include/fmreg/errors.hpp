#pragma once

#include <stdexcept>
#include <string>

namespace fmreg {

/// Bad shapes, non-finite values, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inputs that carry no usable signal (e.g. constant images).
class DegenerateInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Normal equations of the MM update are singular or badly conditioned.
class DegenerateObjective : public std::runtime_error {
public:
    DegenerateObjective(const std::string& what, double dir1, double dir2)
        : std::runtime_error(what), direction_{dir1, dir2} {}

    /// Unit vector along which the objective carries (almost) no curvature.
    double direction(int axis) const { return direction_[axis]; }

private:
    double direction_[2];
};

/// A caller broke a documented precondition (e.g. asymmetric cross-spectrum).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fmreg
