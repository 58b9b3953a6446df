#pragma once

namespace gpr {

inline constexpr const char* kVersion = "0.1.0";

} // namespace gpr
