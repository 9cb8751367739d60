#pragma once

namespace freeconv {

inline constexpr const char* kVersion = "0.1.0";

} // namespace freeconv
