#pragma once

namespace mlife {

inline constexpr const char* version_string = "0.1.0";

}  // namespace mlife
