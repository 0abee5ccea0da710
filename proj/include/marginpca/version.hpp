#pragma once

namespace marginpca {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace marginpca
