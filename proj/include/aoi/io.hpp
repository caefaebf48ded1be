#pragma once

#include <string>

namespace aoi {

/// Shortest round-trip decimal form of v ('.' decimal separator, "nan"/"inf"
/// spelled out).  Bit-stable across runs, which keeps emitted artifacts
/// byte-identical for identical inputs.
std::string format_double(double v);

inline constexpr const char* kToolName = "aoisolve";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace aoi
