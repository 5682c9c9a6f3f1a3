#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace g2t {

/// Content hash of a file (FNV-1a 64, hex).
std::string file_fingerprint(const std::filesystem::path& path);

/// One line of an output directory's append-only manifest.jsonl.
struct RunManifest {
    std::string command;
    std::string tool_version;
    std::uint64_t seed = 0;
    nlohmann::json config = nlohmann::json::object();
    /// input path -> content hash
    std::map<std::string, std::string> inputs;
    /// paths relative to the manifest directory
    std::vector<std::string> artifacts;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

/// Hashes `inputs` and appends the entry to dir/manifest.jsonl. Artifact paths
/// are stored relative to `dir`.
void append_manifest(const std::filesystem::path& dir, RunManifest manifest,
                     const std::vector<std::filesystem::path>& inputs,
                     const std::vector<std::filesystem::path>& artifacts);

std::vector<RunManifest> read_manifest(const std::filesystem::path& dir);

/// Exclusive lock on an output directory for the lifetime of the object.
/// Throws ContractViolation when another command holds it.
class OutputLock {
  public:
    explicit OutputLock(const std::filesystem::path& dir);
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

    static constexpr const char* kFileName = ".g2t.lock";

  private:
    std::filesystem::path path_;
};

}  // namespace g2t
