#pragma once

namespace elolab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace elolab
