#pragma once

#include <stdexcept>
#include <string>

namespace timelens {

// Error hierarchy mirrors the CLI exit codes: config errors exit 2,
// numerical/grid errors exit 3, I/O errors exit 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid physical argument (non-finite, out of domain).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or invalid configuration (scenario files, catalogs, grids at parse time).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical grid cannot represent the requested operation (wraparound, resolution).
class GridError : public Error {
public:
    using Error::Error;
};

/// A measurement is ill-defined on the given data (e.g. multiple half-max regions).
class AmbiguityError : public Error {
public:
    using Error::Error;
};

/// Chain contains an element the exact Gaussian channel cannot represent.
class UnsupportedElementError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace timelens
