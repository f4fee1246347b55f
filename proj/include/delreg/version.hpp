#pragma once

namespace delreg {

inline constexpr const char* kVersion = "0.1.0";

}
