#pragma once

namespace precmat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace precmat
