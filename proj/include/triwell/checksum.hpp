#pragma once

#include <cstddef>
#include <cstdint>

namespace triwell {

// 64-bit FNV-1a. Used for cache headers/payloads and run-manifest artifact
// checksums; stable across platforms for the same byte stream.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace triwell
