#include "g2t/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "g2t/error.hpp"
#include "g2t/random.hpp"
#include "g2t/vocab.hpp"

namespace g2t {

namespace fs = std::filesystem;

std::string file_fingerprint(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return hex64(fnv1a64(bytes));
}

nlohmann::json RunManifest::to_json() const {
    return {{"command", command}, {"tool_version", tool_version}, {"seed", seed},
            {"config", config},   {"inputs", inputs},             {"artifacts", artifacts}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.at("config");
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    return m;
}

void append_manifest(const fs::path& dir, RunManifest manifest, const std::vector<fs::path>& inputs,
                     const std::vector<fs::path>& artifacts) {
    for (const auto& p : inputs) manifest.inputs[p.string()] = file_fingerprint(p);
    for (const auto& p : artifacts) manifest.artifacts.push_back(p.lexically_relative(dir).generic_string());
    std::ofstream out(dir / "manifest.jsonl", std::ios::app);
    if (!out) throw DataError("cannot append to " + (dir / "manifest.jsonl").string());
    out << manifest.to_json().dump() << '\n';
}

std::vector<RunManifest> read_manifest(const fs::path& dir) {
    std::vector<RunManifest> out;
    std::ifstream in(dir / "manifest.jsonl");
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(RunManifest::from_json(nlohmann::json::parse(line)));
    return out;
}

OutputLock::OutputLock(const fs::path& dir) : path_(dir / kFileName) {
    fs::create_directories(dir);
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f)
        throw ContractViolation("output directory " + dir.string() + " is locked by another command (remove " +
                                path_.string() + " if no command is running)");
    std::fclose(f);
}

OutputLock::~OutputLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

}  // namespace g2t
