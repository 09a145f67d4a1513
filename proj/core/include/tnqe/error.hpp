#pragma once

#include <stdexcept>
#include <string>

namespace tnqe {

// Base of every error the library throws. `kind()` is a short stable tag
// ("invalid-input", "structural", "resource", "io") that the CLI prints as a
// machine-parsable prefix.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& message) : Error("invalid-input", message) {}
};

class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& message) : Error("structural", message) {}
};

class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& message) : Error("resource", message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

} // namespace tnqe
