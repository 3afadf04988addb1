#pragma once

#include <stdexcept>
#include <string>

namespace qdcav {

// Base of every error raised by the library. The CLI maps the three
// families below onto distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user input: bad config keys, negative rates, unsorted grids.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Solver failures: singular shifted Liouvillians, non-decaying tails,
// invariant violations during integration, failed fits.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Operator/superoperator shape mismatch.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Scan does not show the structure an extraction routine needs
// (e.g. asking for dips below the dip regime).
class TopologyError : public Error {
public:
    using Error::Error;
};

}  // namespace qdcav
