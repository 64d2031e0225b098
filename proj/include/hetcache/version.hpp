#pragma once

namespace hetcache {

inline constexpr const char* kVersion = "1.0.0";
/// Bumped whenever an engine change can alter reported numbers.
inline constexpr int kAnalyticEngineVersion = 1;
inline constexpr int kMonteCarloEngineVersion = 1;
/// Bumped whenever CSV columns are added, removed, or reordered.
inline constexpr int kCsvSchemaVersion = 1;

}  // namespace hetcache
