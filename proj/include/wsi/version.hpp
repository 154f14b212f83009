#pragma once

namespace wsi {
inline constexpr const char* kVersion = "0.1.0";
}
