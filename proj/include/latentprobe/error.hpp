#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latentprobe {

// Every error carries the module it originated from so the CLI can report
// provenance ("[search-engine] ...").
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error("[" + module + "] " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    FormatError(std::string module, const std::string& message, std::size_t offset)
        : Error(std::move(module), message + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class BackendError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

}  // namespace latentprobe
