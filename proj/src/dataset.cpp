#include "g2t/dataset.hpp"

#include <fstream>
#include <sstream>

#include "g2t/error.hpp"

namespace g2t {

using nlohmann::json;

json example_to_json(const Example& ex) {
    json nodes = json::array();
    for (const auto& n : ex.graph.nodes()) nodes.push_back({{"label", n.label}, {"features", n.features}});
    json edges = json::array();
    for (const auto& e : ex.graph.edges())
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"label", e.label}});
    json j = {{"id", ex.graph.id()}, {"nodes", nodes}, {"edges", edges}, {"target", ex.target}};
    if (!ex.linearised.empty()) j["linearised"] = ex.linearised;
    return j;
}

Example example_from_json(const json& j) {
    std::vector<Node> nodes;
    for (const auto& n : j.at("nodes")) {
        Node node;
        node.label = n.at("label").get<std::string>();
        if (n.contains("features")) node.features = n.at("features").get<std::vector<std::string>>();
        nodes.push_back(std::move(node));
    }
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges"))
        edges.push_back({e.at("src").get<std::size_t>(), e.at("dst").get<std::size_t>(),
                         e.at("label").get<std::string>()});
    Example ex;
    ex.graph = LabeledGraph(j.value("id", std::string{}), std::move(nodes), std::move(edges));
    if (j.contains("target")) ex.target = j.at("target").get<std::vector<std::string>>();
    if (j.contains("linearised")) ex.linearised = j.at("linearised").get<std::vector<std::string>>();
    return ex;
}

std::string to_jsonl_line(const Example& ex) { return example_to_json(ex).dump(); }

Example parse_jsonl_line(std::string_view line, std::size_t line_no) {
    try {
        return example_from_json(json::parse(line));
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad JSONL record: ") + e.what(), line_no, 0);
    }
}

std::vector<Example> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<Example> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_jsonl_line(line, line_no));
        } catch (const ParseError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Example>& examples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& ex : examples) out << to_jsonl_line(ex) << '\n';
}

std::vector<std::string> split_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i];
    }
    return out;
}

}  // namespace g2t
