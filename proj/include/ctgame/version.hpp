#pragma once

namespace ctgame {
inline constexpr const char* kVersion = "0.1.0";
}
