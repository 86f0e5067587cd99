#pragma once

#include <stdexcept>
#include <string>

namespace dthp {

enum class ErrorKind {
    invalid_argument,
    dimension_mismatch,
    data,
    config,
    io,
    numerical,
    unstable_process,
};

/// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[nodiscard]] const char* to_string(ErrorKind kind) noexcept;

}  // namespace dthp
