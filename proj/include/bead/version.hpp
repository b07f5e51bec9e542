#pragma once

namespace bead {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bead
