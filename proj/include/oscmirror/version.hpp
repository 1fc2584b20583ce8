#pragma once

namespace oscmirror {

inline constexpr const char* tool_version = "0.1.0";

}  // namespace oscmirror
