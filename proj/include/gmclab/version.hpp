#pragma once

namespace gmclab {

// Kept in sync with the CMake project version; embedded in every report so
// output files identify the code that produced them.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace gmclab
