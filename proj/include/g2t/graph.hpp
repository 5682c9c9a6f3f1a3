#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace g2t {

/// Reserved label of the synthetic self-loop entry returned by neighbourhood().
inline constexpr std::string_view kSelfLabel = "self";

struct Node {
    std::string label;
    /// `key=value` strings, possibly empty.
    std::vector<std::string> features;

    bool operator==(const Node&) const = default;
};

struct Edge {
    std::size_t src = 0;
    std::size_t dst = 0;
    std::string label;

    bool operator==(const Edge&) const = default;
};

enum class EdgeDirection { in, out, loop };

std::string_view to_string(EdgeDirection dir);

struct NeighbourEntry {
    std::size_t node;
    std::string label;
    EdgeDirection direction;

    bool operator==(const NeighbourEntry&) const = default;
};

/// Directed graph with labelled nodes and edges. Node index = position in nodes().
///
/// Instances are not checked on construction; use validate_graph() before
/// feeding one to an encoder. Self-edges present in the data are stored like
/// any other edge and are distinct from the synthetic loop entry.
class LabeledGraph {
  public:
    LabeledGraph() = default;
    LabeledGraph(std::string id, std::vector<Node> nodes, std::vector<Edge> edges);

    const std::string& id() const { return id_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const Node& node(std::size_t i) const { return nodes_.at(i); }

    std::size_t in_degree(std::size_t v) const;
    std::size_t out_degree(std::size_t v) const;

    bool operator==(const LabeledGraph&) const = default;

  private:
    std::string id_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
};

struct Violation {
    enum class Kind {
        empty_graph,
        empty_node_label,
        bad_feature,
        edge_src_out_of_range,
        edge_dst_out_of_range,
        empty_edge_label,
    };
    Kind kind;
    /// Node or edge index the violation refers to (0 for empty_graph).
    std::size_t index = 0;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_graph(const LabeledGraph& g);

/// True iff `feature` has the form key=value with non-empty key and value.
bool is_valid_feature(std::string_view feature);

/// Loop entry first, then outgoing edges, then incoming edges, each in insertion order.
/// Throws ContractViolation if v is out of range.
std::vector<NeighbourEntry> neighbourhood(const LabeledGraph& g, std::size_t v);

/// Per-node neighbourhoods for every node, same ordering as neighbourhood().
std::vector<std::vector<NeighbourEntry>> all_neighbourhoods(const LabeledGraph& g);

}  // namespace g2t
