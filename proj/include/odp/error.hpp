#pragma once

#include <stdexcept>
#include <string>

namespace odp {

/// Base class for every error raised by the pricing engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Density vanishes where a virtual value was requested.
class ZeroDensity : public Error {
public:
    using Error::Error;
};

/// A solver that needs strict regularity was handed a distribution without it.
class IrregularDistribution : public Error {
public:
    using Error::Error;
};

/// Scenario shape does not match what the functional models (queue, workers, discount).
class ModelMismatch : public Error {
public:
    using Error::Error;
};

class NonFiniteRate : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class TooManyClasses : public Error {
public:
    using Error::Error;
};

/// Undifferentiated workers undercut each other, so no pure price equilibrium exists.
class NoEquilibrium : public Error {
public:
    using Error::Error;
};

/// Malformed scenario file or simulation configuration. `path()` is a JSON-pointer-like key path.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)), detail_(what) {}

    const std::string& path() const noexcept { return path_; }
    /// The message without the key path.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string path_;
    std::string detail_;
};

}  // namespace odp
