#pragma once

#include <stdexcept>
#include <string>

namespace rflab {

/// Invalid arguments to a builder or analysis routine.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// A value violates the invariants of its type (non-SPD matrix, non-monotone grid, ...).
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// Builder could not produce a smooth admissible profile.
class ConstructionError : public std::runtime_error {
public:
    explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

/// Curvature requested on a profile whose warping radius vanishes in the interior.
class SingularProfileError : public std::runtime_error {
public:
    explicit SingularProfileError(const std::string& what) : std::runtime_error(what) {}
};


/// A time step produced a non-finite or non-positive warping radius.
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A step size above the parabolic stability limit was requested.
class StepRejected : public ParameterError {
public:
    explicit StepRejected(const std::string& what) : ParameterError(what) {}
};


/// Malformed scenario or data file. `where` names the line or field.
class ConfigError : public ParameterError {
public:
    ConfigError(const std::string& where, const std::string& what) : ParameterError(where + ": " + what) {}
};

} // namespace rflab
