#include "g2t/graph.hpp"

#include "g2t/error.hpp"

namespace g2t {

std::string_view to_string(EdgeDirection dir) {
    switch (dir) {
        case EdgeDirection::in: return "in";
        case EdgeDirection::out: return "out";
        case EdgeDirection::loop: return "loop";
    }
    return "?";
}

LabeledGraph::LabeledGraph(std::string id, std::vector<Node> nodes, std::vector<Edge> edges)
    : id_(std::move(id)), nodes_(std::move(nodes)), edges_(std::move(edges)) {}

std::size_t LabeledGraph::in_degree(std::size_t v) const {
    std::size_t n = 0;
    for (const auto& e : edges_) n += e.dst == v;
    return n;
}

std::size_t LabeledGraph::out_degree(std::size_t v) const {
    std::size_t n = 0;
    for (const auto& e : edges_) n += e.src == v;
    return n;
}

bool is_valid_feature(std::string_view feature) {
    const auto eq = feature.find('=');
    return eq != std::string_view::npos && eq > 0 && eq + 1 < feature.size();
}

ValidationReport validate_graph(const LabeledGraph& g) {
    ValidationReport report;
    auto add = [&](Violation::Kind kind, std::size_t index, std::string msg) {
        report.violations.push_back({kind, index, std::move(msg)});
    };
    if (g.node_count() == 0) add(Violation::Kind::empty_graph, 0, "empty graph");

    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto& node = g.nodes()[i];
        if (node.label.empty())
            add(Violation::Kind::empty_node_label, i, "node " + std::to_string(i) + ": empty label");
        for (const auto& f : node.features) {
            if (!is_valid_feature(f))
                add(Violation::Kind::bad_feature, i,
                    "node " + std::to_string(i) + ": malformed feature '" + f + "'");
        }
    }
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        const auto& e = g.edges()[i];
        const auto tag = "edge " + std::to_string(i) + ": ";
        if (e.src >= g.node_count())
            add(Violation::Kind::edge_src_out_of_range, i, tag + "edge src out of range");
        if (e.dst >= g.node_count())
            add(Violation::Kind::edge_dst_out_of_range, i, tag + "edge dst out of range");
        if (e.label.empty()) add(Violation::Kind::empty_edge_label, i, tag + "empty edge label");
    }
    return report;
}

std::vector<NeighbourEntry> neighbourhood(const LabeledGraph& g, std::size_t v) {
    if (v >= g.node_count())
        throw ContractViolation("neighbourhood: node " + std::to_string(v) + " out of range (" +
                                std::to_string(g.node_count()) + " nodes)");
    std::vector<NeighbourEntry> out;
    out.push_back({v, std::string(kSelfLabel), EdgeDirection::loop});
    for (const auto& e : g.edges())
        if (e.src == v) out.push_back({e.dst, e.label, EdgeDirection::out});
    for (const auto& e : g.edges())
        if (e.dst == v) out.push_back({e.src, e.label, EdgeDirection::in});
    return out;
}

std::vector<std::vector<NeighbourEntry>> all_neighbourhoods(const LabeledGraph& g) {
    std::vector<std::vector<NeighbourEntry>> out(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v)
        out[v].push_back({v, std::string(kSelfLabel), EdgeDirection::loop});
    for (const auto& e : g.edges()) out.at(e.src).push_back({e.dst, e.label, EdgeDirection::out});
    // incoming entries go after all outgoing ones
    std::vector<std::vector<NeighbourEntry>> incoming(g.node_count());
    for (const auto& e : g.edges()) incoming.at(e.dst).push_back({e.src, e.label, EdgeDirection::in});
    for (std::size_t v = 0; v < g.node_count(); ++v)
        out[v].insert(out[v].end(), incoming[v].begin(), incoming[v].end());
    return out;
}

}  // namespace g2t
