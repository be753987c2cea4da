#pragma once

namespace wr {

inline constexpr const char* kVersion = "0.1.0";

} // namespace wr
