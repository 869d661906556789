#pragma once

#include <stdexcept>
#include <string>

namespace defence {

/// Bad input: wrong dimensions, invalid parameters, malformed files.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// File system or codec failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// The split Bregman solver could not make progress (step size underflow).
class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Motion estimation had nothing to work with (e.g. no overlapping valid pixels).
class EstimationFailure : public std::runtime_error {
public:
    explicit EstimationFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace defence
