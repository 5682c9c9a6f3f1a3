#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "g2t/dataset.hpp"
#include "g2t/graph.hpp"

namespace g2t {

inline constexpr std::string_view kSubjectLabel = "A0";
inline constexpr std::string_view kObjectLabel = "A1";
inline constexpr std::string_view kNamedEntityLabel = "NE";
inline constexpr std::string_view kSrootLabel = "SROOT";
inline constexpr std::size_t kMaxTargetLength = 50;

struct Triple {
    std::string subject;
    std::string relation;
    std::string object;

    bool operator==(const Triple&) const = default;
};

/// placeholder -> surface string
using RelexTable = std::map<std::string, std::string>;

// ---- WebNLG ---------------------------------------------------------------

/// One relation node per triple (never shared), linked to its subject by A0 and
/// its object by A1. Entity nodes come first in first-mention order, then the
/// relation nodes in triple order.
LabeledGraph reify(const std::vector<Triple>& triples, std::string id = {});

/// True for nodes created by reify(): they carry an outgoing A0 or A1 edge.
bool is_relation_node(const LabeledGraph& g, std::size_t v);

/// Replaces every multi-word entity node by a chain w1 -NE-> w2 -NE-> ... wk.
/// External edges re-attach to w1; relation nodes are left alone.
LabeledGraph split_multiword_entities(const LabeledGraph& g);

struct Delexicalised {
    std::vector<Triple> triples;
    std::vector<std::string> target;
    RelexTable relex;
};

/// Exact-string delexicalisation. `category_map` maps entity -> placeholder.
/// Throws DataError when two entities of the example share a placeholder.
Delexicalised delexicalise(const std::vector<Triple>& triples, const std::vector<std::string>& target,
                           const std::map<std::string, std::string>& category_map);

/// Replaces placeholder tokens by their (possibly multi-word) surface strings.
std::vector<std::string> relexicalise(const std::vector<std::string>& tokens, const RelexTable& relex);

struct WebNlgRecord {
    std::string id;
    std::vector<Triple> triples;
    std::vector<std::string> target;
    std::size_t line = 0;
};

/// Blank-line separated blocks of `subject | relation | object` lines plus a
/// `# text:` line (and an optional `# id:` line).
std::vector<WebNlgRecord> parse_webnlg(std::istream& in);

/// `entity<TAB>PLACEHOLDER` per line.
std::map<std::string, std::string> parse_category_map(std::istream& in);

// ---- SR11Deep -------------------------------------------------------------

struct Anonymised {
    LabeledGraph graph;
    RelexTable relex;
};

/// `types` maps node index -> type tag (e.g. PER). Labels become TYPE_k with k
/// counting distinct entities of that type in node-index order.
Anonymised anonymise_sr(const LabeledGraph& g, const std::map<std::size_t, std::string>& types);

/// Parses `(parent label child)` tuples and optional `lemma<TAB>k=v,k=v` lines.
/// Nodes are keyed by lemma; SROOT is materialised as a node.
LabeledGraph parse_sr11(std::string_view record, std::string id = {});

struct Sr11Record {
    std::string id;
    LabeledGraph graph;
    std::vector<std::string> target;
    /// lemma -> entity type, from `# ne: TYPE lemma` lines
    std::map<std::string, std::string> entity_types;
    std::size_t line = 0;
};

/// Blank-line separated SR11 records with `# text:`, `# id:` and `# ne:` lines.
std::vector<Sr11Record> parse_sr11_file(std::istream& in);

// ---- shared ---------------------------------------------------------------

struct LinearisationOptions {
    bool emit_edge_labels = true;
};

/// Depth-first linearisation with seeded sibling order. Revisited nodes are
/// re-emitted but not re-expanded.
std::vector<std::string> linearise(const LabeledGraph& g, std::uint64_t rng_seed,
                                   const LinearisationOptions& options = {});

/// Keeps examples whose target has at most `max_len` tokens, order preserved.
DatasetSplit filter_long_targets(const DatasetSplit& split, std::size_t max_len = kMaxTargetLength);

/// Per-example seed derived from a global seed and the example id.
std::uint64_t example_seed(std::uint64_t global_seed, std::string_view example_id);

}  // namespace g2t
