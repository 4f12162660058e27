#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace eyespot {

enum class ErrorCode {
    io,                // unreadable or unwritable file
    format,            // malformed or unsupported file contents
    truncated,         // file ends before the declared payload
    dimension,         // dimension mismatch or overflow
    invalid_argument,  // caller violated a precondition
    runtime,           // anything else
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace eyespot
