#pragma once

namespace echonet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace echonet
