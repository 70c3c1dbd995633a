#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flower {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The data source cannot be opened or read.
class SourceError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value, file or flag combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at byte " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace flower
