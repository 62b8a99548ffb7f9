#pragma once

#include <stdexcept>
#include <string>

namespace klslab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstructionError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct DegenerateTiltError : Error {
    using Error::Error;
};

struct DegenerateCovarianceError : Error {
    using Error::Error;
};

struct PreconditionError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace klslab
