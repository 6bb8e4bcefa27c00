#pragma once

#include <stdexcept>
#include <string>

namespace cartan_lab {

// Base for every error raised by the library. The CLI maps InvalidInput to
// exit status 2 and everything else to 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition or parameter constraint violated by the caller.
struct InvalidInput : Error {
    using Error::Error;
};

struct DimensionMismatch : InvalidInput {
    using InvalidInput::InvalidInput;
};

// Geometric hypothesis (ball containment, isolation radius) violated.
struct GeometryError : InvalidInput {
    using InvalidInput::InvalidInput;
};

// Requested scale is finer than the sample cloud can resolve.
struct ResolutionError : Error {
    using Error::Error;
};

// Output would exceed a configured size cap.
struct ResourceError : Error {
    using Error::Error;
};

// Input is well-formed but carries no information (empty ball, f == -inf, ...).
struct DegenerateError : Error {
    using Error::Error;
};

} // namespace cartan_lab
