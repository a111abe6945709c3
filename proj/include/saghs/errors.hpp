#pragma once

#include <stdexcept>
#include <string>

namespace saghs {

/// File could not be read or written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File content is not a supported image/weight format or is malformed.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A channel carries no usable signal (constant or zero-mean).
struct DegenerateChannelError : std::runtime_error {
    explicit DegenerateChannelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Tensor/weight dimensions are inconsistent. Message names the offending field.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace saghs
