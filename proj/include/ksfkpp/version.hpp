#pragma once

namespace ksfkpp {

inline constexpr const char* version = "0.1.0";

}  // namespace ksfkpp
