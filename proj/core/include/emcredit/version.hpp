#pragma once

namespace emcredit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace emcredit
