#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace d2drelay::cli {

struct RunManifest {
    std::string command;
    std::string resolved_config;  // ini text
    std::uint64_t seed = 0;
    std::string version;
    double duration_s = 0.0;
    std::vector<std::filesystem::path> outputs;  // relative to the output dir
    std::vector<std::pair<std::string, std::string>> options;  // command-specific flags
};

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Writes resolved.ini and manifest.json into `dir`.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

}  // namespace d2drelay::cli
