// error.hpp
// Exception type shared by every module.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coreqkd {

enum class ErrorCode {
    InvalidArgument,
    Collision,         // two particles in one device slot
    Stuck,             // a particle never leaves the device
    Unrealizable,      // no switch schedule within the delay budget
    InsufficientSift,  // bootstrap produced too few key bits
    RejectedTranscript,
    Parse,
    Io,
    Internal,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::Collision: return "COLLISION";
        case ErrorCode::Stuck: return "STUCK";
        case ErrorCode::Unrealizable: return "UNREALIZABLE";
        case ErrorCode::InsufficientSift: return "INSUFFICIENT_SIFT";
        case ErrorCode::RejectedTranscript: return "REJECTED_TRANSCRIPT";
        case ErrorCode::Parse: return "PARSE";
        case ErrorCode::Io: return "IO";
        case ErrorCode::Internal: return "INTERNAL";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace coreqkd
