#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vdt::cli {

struct Artifact {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

/// Everything needed to rerun a command: the invocation, its inputs and the
/// checksums of what it wrote. Contains no wall-clock data, so reruns with
/// the same arguments produce the same manifest.
struct RunManifest {
    std::string command;
    std::vector<std::string> arguments;
    std::vector<std::string> config_paths;
    std::uint64_t seed = 0;
    std::string output_dir;
    std::vector<Artifact> artifacts;

    /// Hashes every regular file under `output_dir` except manifest.json,
    /// sorted by relative path.
    void collect_artifacts();
    nlohmann::json to_json() const;
    /// Writes output_dir/manifest.json and returns its path.
    std::filesystem::path write() const;
};

/// Lower-case hex SHA-256 of a file. Throws LoadError if it cannot be read.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& data);

} // namespace vdt::cli
