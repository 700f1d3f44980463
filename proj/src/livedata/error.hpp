#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace livedata {

enum class ErrorCode {
    Validation,
    Parse,
    InvalidArgument,
    NotFound,
    Conflict,
    Policy,
    UnknownPeer,
    Integrity,
    Transient,
    Io,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the core carries a machine-readable code; the C API
/// and the HTTP layer map codes to status values.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace livedata
