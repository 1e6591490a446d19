#pragma once

namespace sprtree {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sprtree
