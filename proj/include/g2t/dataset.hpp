#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "g2t/graph.hpp"

namespace g2t {

/// One (graph, target) pair. `linearised` is filled only for the sequential baseline.
struct Example {
    LabeledGraph graph;
    std::vector<std::string> target;
    std::vector<std::string> linearised;

    const std::string& id() const { return graph.id(); }
    bool operator==(const Example&) const = default;
};

struct DatasetSplit {
    std::string name;  // train | dev | test
    std::vector<Example> examples;
};

nlohmann::json example_to_json(const Example& ex);
Example example_from_json(const nlohmann::json& j);

/// Canonical single-line serialisation (no trailing newline).
std::string to_jsonl_line(const Example& ex);
/// Throws ParseError carrying `line_no`.
Example parse_jsonl_line(std::string_view line, std::size_t line_no = 1);

std::vector<Example> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<Example>& examples);

/// Whitespace tokenisation used by every text pipeline in the toolkit.
std::vector<std::string> split_tokens(std::string_view text);
std::string join_tokens(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace g2t
