#pragma once

#include <stdexcept>
#include <string>

namespace vectorforge {

/// File or OS failure (missing input, unwritable output). CLI exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// NaN/Inf detected in a loss or gradient. CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vectorforge
