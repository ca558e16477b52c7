#pragma once

#include <concepts>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lpsvm::cli {

inline constexpr std::string_view tool_name = "lpmcsvm";
inline constexpr std::string_view tool_version = "0.1.0";

// One line of space-separated key=value pairs; keys keep insertion order.
class Record {
public:
    explicit Record(std::string_view kind);

    Record& add(std::string_view key, std::string_view value);
    Record& add(std::string_view key, const char* value) { return add(key, std::string_view(value)); }
    Record& add(std::string_view key, double value);
    Record& add(std::string_view key, bool value);
    template <std::integral T>
        requires(!std::same_as<T, bool>)
    Record& add(std::string_view key, T value) {
        return add(key, std::string_view(std::to_string(value)));
    }

    std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

// Canonical "k=v;k=v" description of a run, hashed into every output record.
class ConfigFingerprint {
public:
    ConfigFingerprint& add(std::string_view key, std::string_view value);
    ConfigFingerprint& add(std::string_view key, double value);
    ConfigFingerprint& add(std::string_view key, std::uint64_t value);
    std::string hash() const;

private:
    std::string text_;
};

// Provenance fields shared by all records.
Record provenance(std::string_view kind, const ConfigFingerprint& config, std::uint64_t seed);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace lpsvm::cli
