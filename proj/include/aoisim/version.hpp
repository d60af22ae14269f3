#pragma once

namespace aoisim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aoisim
