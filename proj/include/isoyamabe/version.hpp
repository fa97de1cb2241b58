#pragma once

namespace isoyamabe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace isoyamabe
