#pragma once

namespace modalshm {

inline constexpr const char* version = "0.1.0";

}  // namespace modalshm
