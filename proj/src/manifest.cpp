#include "symptomnet/manifest.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace symptomnet {

namespace {

std::string stored_path(const std::filesystem::path& file, const std::filesystem::path& dir) {
    const auto abs_file = std::filesystem::weakly_canonical(std::filesystem::absolute(file));
    const auto abs_dir = std::filesystem::weakly_canonical(std::filesystem::absolute(dir));
    const auto rel = abs_file.lexically_relative(abs_dir);
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    return abs_file.generic_string();
}

std::filesystem::path resolve(const std::string& stored, const std::filesystem::path& dir) {
    const std::filesystem::path p(stored);
    return p.is_absolute() ? p : dir / p;
}

void check(const ManifestArtifact& a, const std::filesystem::path& dir) {
    const auto path = resolve(a.path, dir);
    if (!std::filesystem::exists(path)) throw FormatError("manifest artifact '" + a.role + "' missing: " + path.string());
    const auto digest = file_digest(path);
    if (digest != a.digest) {
        throw FormatError("manifest artifact '" + a.role + "' (" + path.string() + ") digest " + digest +
                          " does not match recorded " + a.digest);
    }
}

}  // namespace

std::string file_digest(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf.data(), 16);
}

void RunManifest::add(const std::string& role, const std::filesystem::path& file,
                      const std::filesystem::path& manifest_dir) {
    ManifestArtifact a{role, stored_path(file, manifest_dir), file_digest(file)};
    auto it = std::find_if(artifacts.begin(), artifacts.end(), [&](const auto& x) { return x.role == role; });
    if (it != artifacts.end()) {
        *it = std::move(a);
    } else {
        artifacts.push_back(std::move(a));
    }
}

const ManifestArtifact* RunManifest::find(const std::string& role) const {
    auto it = std::find_if(artifacts.begin(), artifacts.end(), [&](const auto& x) { return x.role == role; });
    return it == artifacts.end() ? nullptr : &*it;
}

void RunManifest::verify(const std::filesystem::path& manifest_dir) const {
    for (const auto& a : artifacts) check(a, manifest_dir);
}

void RunManifest::verify_file(const std::filesystem::path& file, const std::filesystem::path& manifest_dir) const {
    const auto key = stored_path(file, manifest_dir);
    for (const auto& a : artifacts) {
        if (a.path == key) check(a, manifest_dir);
    }
}

Json manifest_to_json(const RunManifest& m) {
    Json seeds = Json::object();
    for (const auto& [k, v] : m.seeds) seeds[k] = v;
    Json artifacts = Json::array();
    for (const auto& a : m.artifacts) artifacts.push_back(Json{{"role", a.role}, {"path", a.path}, {"digest", a.digest}});
    return Json{{"seeds", std::move(seeds)}, {"artifacts", std::move(artifacts)}};
}

RunManifest manifest_from_json(const Json& json) {
    RunManifest m;
    try {
        if (json.contains("seeds")) m.seeds = json.at("seeds").get<std::map<std::string, std::uint64_t>>();
        for (const auto& a : json.at("artifacts")) {
            m.artifacts.push_back({a.at("role").get<std::string>(), a.at("path").get<std::string>(),
                                   a.at("digest").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

RunManifest read_manifest(const std::filesystem::path& path) { return manifest_from_json(read_json_file(path)); }

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    write_text_file(path, dump(manifest_to_json(manifest)));
}

}  // namespace symptomnet
