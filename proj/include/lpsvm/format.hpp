#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lpsvm {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
// Whole-token parse; nullopt on trailing garbage or empty input. Accepts a leading '+'.
std::optional<double> parse_double(std::string_view token);
std::optional<std::int64_t> parse_int(std::string_view token);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t value);

}  // namespace lpsvm
