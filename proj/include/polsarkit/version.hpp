#pragma once

#include <cstdint>

namespace polsar {

inline constexpr const char* kToolVersion = "0.1.0";

// On-disk format versions. Bump when a layout changes.
inline constexpr std::uint16_t kCpxrVersion = 1;
inline constexpr std::uint16_t kSpanVersion = 1;
inline constexpr std::uint16_t kStackVersion = 1;
inline constexpr std::uint16_t kMaskVersion = 1;
inline constexpr std::uint16_t kQueryVersion = 1;
inline constexpr std::uint16_t kCheckpointVersion = 1;
inline constexpr int kConfigVersion = 1;

// Shipped seeds. These are part of the query/checkpoint format version:
// regenerating the query bank with a different seed is a format change.
inline constexpr std::uint64_t kAdaptiveBasisSeed = 0x9e3779b97f4a7c15ULL;
inline constexpr std::uint64_t kQuerySeed = 0x87d4a5180f6a3645ULL;
inline constexpr int kQuerySamplePairs = 64;

}  // namespace polsar
