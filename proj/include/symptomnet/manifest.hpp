#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "symptomnet/serialization.hpp"

namespace symptomnet {

// 64-bit FNV-1a of the file bytes, as 16 lowercase hex digits.
std::string file_digest(const std::filesystem::path& path);

struct ManifestArtifact {
    std::string role;  // e.g. "development", "network", "calibrators"
    std::string path;  // relative to the manifest's directory when possible
    std::string digest;
};

// Run record: seeds, config digest and artifact digests. Paths are stored
// relative to the manifest so a run directory can be moved as a whole.
struct RunManifest {
    std::map<std::string, std::uint64_t> seeds;
    std::vector<ManifestArtifact> artifacts;

    // Replaces an existing entry with the same role.
    void add(const std::string& role, const std::filesystem::path& file, const std::filesystem::path& manifest_dir);
    const ManifestArtifact* find(const std::string& role) const;

    // Throws FormatError naming the first artifact that is missing or whose digest differs.
    void verify(const std::filesystem::path& manifest_dir) const;
    // Verifies only the artifact stored at `file`, if recorded.
    void verify_file(const std::filesystem::path& file, const std::filesystem::path& manifest_dir) const;
};

Json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const Json& json);

RunManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace symptomnet
