#include "record.hpp"

#include <fstream>
#include <system_error>
#include <unistd.h>

#include "lpsvm/error.hpp"
#include "lpsvm/format.hpp"

namespace lpsvm::cli {

namespace {

std::string sanitize(std::string_view v) {
    std::string out(v);
    for (char& ch : out)
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '=') ch = '_';
    return out.empty() ? "-" : out;
}

}  // namespace

Record::Record(std::string_view kind) { fields_.emplace_back("record", sanitize(kind)); }

Record& Record::add(std::string_view key, std::string_view value) {
    fields_.emplace_back(std::string(key), sanitize(value));
    return *this;
}

Record& Record::add(std::string_view key, double value) { return add(key, std::string_view(format_double(value))); }
Record& Record::add(std::string_view key, bool value) { return add(key, std::string_view(value ? "1" : "0")); }

std::string Record::str() const {
    std::string out;
    for (const auto& [k, v] : fields_) {
        if (!out.empty()) out += ' ';
        out += k;
        out += '=';
        out += v;
    }
    return out;
}

ConfigFingerprint& ConfigFingerprint::add(std::string_view key, std::string_view value) {
    text_ += key;
    text_ += '=';
    text_ += value;
    text_ += ';';
    return *this;
}

ConfigFingerprint& ConfigFingerprint::add(std::string_view key, double value) {
    return add(key, std::string_view(format_double(value)));
}

ConfigFingerprint& ConfigFingerprint::add(std::string_view key, std::uint64_t value) {
    return add(key, std::string_view(std::to_string(value)));
}

std::string ConfigFingerprint::hash() const { return hex64(fnv1a64(text_)); }

Record provenance(std::string_view kind, const ConfigFingerprint& config, std::uint64_t seed) {
    Record r(kind);
    r.add("tool", tool_name).add("version", tool_version).add("config", std::string_view(config.hash())).add("seed", seed);
    return r;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + path.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("failed writing '" + path.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot replace '" + path.string() + "'");
    }
}

}  // namespace lpsvm::cli
