#pragma once

namespace tcsde {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tcsde
