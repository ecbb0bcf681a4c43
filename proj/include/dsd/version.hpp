#pragma once

namespace dsd {

inline constexpr const char* kVersion = "1.0.0";
/// Bumped whenever a CSV/TSV or cache layout changes.
inline constexpr int kFormatVersion = 1;

}  // namespace dsd
