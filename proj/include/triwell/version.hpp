#pragma once

namespace triwell {

inline constexpr const char* kVersion = "triwell 0.1.0 (cache format 1)";

}  // namespace triwell
