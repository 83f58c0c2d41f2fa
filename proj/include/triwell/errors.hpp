#pragma once

#include <stdexcept>
#include <string>

namespace triwell {

// Exit-code taxonomy used by the CLI: 2 config, 3 compute, 4 cache.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CacheErrorCode {
    io,
    version_mismatch,
    param_mismatch,
    truncated,
    checksum_mismatch,
};

struct CacheError : std::runtime_error {
    CacheErrorCode code;
    CacheError(CacheErrorCode c, const std::string& msg)
        : std::runtime_error(msg), code(c) {}
};

inline const char* to_string(CacheErrorCode c) {
    switch (c) {
        case CacheErrorCode::io: return "io";
        case CacheErrorCode::version_mismatch: return "version_mismatch";
        case CacheErrorCode::param_mismatch: return "param_mismatch";
        case CacheErrorCode::truncated: return "truncated";
        case CacheErrorCode::checksum_mismatch: return "checksum_mismatch";
    }
    return "unknown";
}

}  // namespace triwell
