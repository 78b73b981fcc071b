#pragma once

namespace rnorm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rnorm
