#pragma once

namespace mwi {

inline constexpr const char* kVersion = "0.1.0";

} // namespace mwi
