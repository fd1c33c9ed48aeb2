#pragma once

namespace contourbench {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolkitName = "contour-bench";

}  // namespace contourbench
