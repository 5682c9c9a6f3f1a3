#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "g2t/ingestion.hpp"

namespace g2t {

enum class Task { webnlg, sr11, synthetic };

Task parse_task(std::string_view s);
std::string_view to_string(Task t);

struct PreprocessOptions {
    Task task = Task::webnlg;
    /// A file (one split named `split`) or a directory holding train/dev/test.txt.
    std::filesystem::path input;
    std::string split = "train";
    std::filesystem::path out;
    std::optional<std::filesystem::path> categories;  // WebNLG delexicalisation map
    bool split_entities = false;
    bool lowercase = false;
    bool linearise = false;
    bool edge_labels = true;
    std::uint64_t seed = 1;
    std::size_t max_target_len = kMaxTargetLength;
    std::size_t min_count = 1;
    /// synthetic task only: train/dev/test sizes
    std::size_t synthetic_train = 20;
    std::size_t synthetic_dev = 5;
    std::size_t synthetic_test = 5;
};

struct SplitStats {
    std::string name;
    std::size_t read = 0;
    std::size_t kept = 0;
    std::size_t filtered = 0;
    std::size_t relations = 0;  // distinct relation / dependency labels

    nlohmann::json to_json() const;
};

struct PreprocessReport {
    std::string task;
    std::vector<SplitStats> splits;
    std::size_t relations = 0;  // over all splits
    std::vector<std::string> warnings;
    std::vector<std::filesystem::path> artifacts;

    nlohmann::json to_json() const;
};

/// Reads, converts and filters every split, then writes {split}.jsonl,
/// {split}.relex.json (id -> placeholder table, only when non-empty),
/// vocab.json (from train) and stats.json into `out`.
/// Throws DataError with file:line context on malformed input.
PreprocessReport preprocess(const PreprocessOptions& options);

/// id -> relex table
std::map<std::string, RelexTable> read_relex_tables(const std::filesystem::path& path);

}  // namespace g2t
