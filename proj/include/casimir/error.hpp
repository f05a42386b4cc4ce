#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Bad user input (config, file formats, preconditions on arguments).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Anything that went wrong while computing: non-convergence, det <= 0, ...
class NumericalFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalFault {
public:
    using NumericalFault::NumericalFault;
};

class NonContractive : public NumericalFault {
public:
    using NumericalFault::NumericalFault;
};

class GeometryFault : public NumericalFault {
public:
    using NumericalFault::NumericalFault;
};

// Raised by polarization_rotation at the backscattering point.
class RemovableSingularity : public NumericalFault {
public:
    using NumericalFault::NumericalFault;
};

}  // namespace casimir
