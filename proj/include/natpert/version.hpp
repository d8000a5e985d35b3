#pragma once

namespace natpert {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace natpert
