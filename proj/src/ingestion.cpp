#include "g2t/ingestion.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "g2t/error.hpp"
#include "g2t/random.hpp"

namespace g2t {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::vector<std::string> split_on(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

LabeledGraph reify(const std::vector<Triple>& triples, std::string id) {
    std::vector<Node> nodes;
    std::unordered_map<std::string, std::size_t> entity_index;
    auto entity = [&](const std::string& name) {
        auto [it, inserted] = entity_index.emplace(name, nodes.size());
        if (inserted) nodes.push_back({name, {}});
        return it->second;
    };
    std::vector<std::pair<std::size_t, std::size_t>> args;
    for (const auto& t : triples) {
        const auto s = entity(t.subject);
        const auto o = entity(t.object);
        args.emplace_back(s, o);
    }

    std::vector<Edge> edges;
    for (std::size_t k = 0; k < triples.size(); ++k) {
        const std::size_t rel = nodes.size();
        nodes.push_back({triples[k].relation, {}});
        edges.push_back({rel, args[k].first, std::string(kSubjectLabel)});
        edges.push_back({rel, args[k].second, std::string(kObjectLabel)});
    }
    return LabeledGraph(std::move(id), std::move(nodes), std::move(edges));
}

bool is_relation_node(const LabeledGraph& g, std::size_t v) {
    return std::any_of(g.edges().begin(), g.edges().end(), [&](const Edge& e) {
        return e.src == v && (e.label == kSubjectLabel || e.label == kObjectLabel);
    });
}

LabeledGraph split_multiword_entities(const LabeledGraph& g) {
    std::vector<Node> nodes;
    std::vector<std::size_t> head(g.node_count());
    std::vector<Edge> chain_edges;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        const auto& node = g.nodes()[v];
        const auto words = split_tokens(node.label);
        head[v] = nodes.size();
        if (words.size() <= 1 || is_relation_node(g, v)) {
            nodes.push_back(node);
            continue;
        }
        for (std::size_t w = 0; w < words.size(); ++w) {
            if (w > 0) chain_edges.push_back({nodes.size() - 1, nodes.size(), std::string(kNamedEntityLabel)});
            nodes.push_back({words[w], w == 0 ? node.features : std::vector<std::string>{}});
        }
    }
    std::vector<Edge> edges;
    edges.reserve(g.edge_count() + chain_edges.size());
    for (const auto& e : g.edges()) edges.push_back({head.at(e.src), head.at(e.dst), e.label});
    edges.insert(edges.end(), chain_edges.begin(), chain_edges.end());
    return LabeledGraph(g.id(), std::move(nodes), std::move(edges));
}

Delexicalised delexicalise(const std::vector<Triple>& triples, const std::vector<std::string>& target,
                           const std::map<std::string, std::string>& category_map) {
    Delexicalised out;
    std::map<std::string, std::string> used;  // placeholder -> entity
    auto map_entity = [&](const std::string& entity) -> std::string {
        auto it = category_map.find(entity);
        if (it == category_map.end()) return entity;
        auto [pos, inserted] = used.emplace(it->second, entity);
        if (!inserted && pos->second != entity)
            throw DataError("placeholder collision: '" + pos->second + "' and '" + entity + "' both map to " +
                            it->second);
        return it->second;
    };
    for (const auto& t : triples) out.triples.push_back({map_entity(t.subject), t.relation, map_entity(t.object)});

    // longest entities first so that "Apollo 8" wins over "Apollo"
    std::vector<std::pair<std::vector<std::string>, std::string>> patterns;
    for (const auto& [placeholder, entity] : used) patterns.emplace_back(split_tokens(entity), placeholder);
    std::stable_sort(patterns.begin(), patterns.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

    for (std::size_t i = 0; i < target.size();) {
        bool matched = false;
        for (const auto& [words, placeholder] : patterns) {
            if (words.empty() || i + words.size() > target.size()) continue;
            if (std::equal(words.begin(), words.end(), target.begin() + static_cast<std::ptrdiff_t>(i))) {
                out.target.push_back(placeholder);
                i += words.size();
                matched = true;
                break;
            }
        }
        if (!matched) out.target.push_back(target[i++]);
    }
    out.relex.insert(used.begin(), used.end());
    return out;
}

std::vector<std::string> relexicalise(const std::vector<std::string>& tokens, const RelexTable& relex) {
    std::vector<std::string> out;
    for (const auto& tok : tokens) {
        auto it = relex.find(tok);
        if (it == relex.end()) {
            out.push_back(tok);
            continue;
        }
        for (auto& w : split_tokens(it->second)) out.push_back(std::move(w));
    }
    return out;
}

std::vector<WebNlgRecord> parse_webnlg(std::istream& in) {
    std::vector<WebNlgRecord> records;
    WebNlgRecord cur;
    bool open = false;
    auto flush = [&] {
        if (open) {
            if (cur.id.empty()) cur.id = "webnlg-" + std::to_string(records.size());
            records.push_back(std::move(cur));
        }
        cur = {};
        open = false;
    };
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) {
            flush();
            continue;
        }
        if (!open) {
            open = true;
            cur.line = line_no;
        }
        if (starts_with(line, "# text:")) {
            cur.target = split_tokens(line.substr(7));
        } else if (starts_with(line, "# id:")) {
            cur.id = std::string(trim(line.substr(5)));
        } else if (starts_with(line, "#")) {
            continue;
        } else {
            auto fields = split_on(line, '|');
            if (fields.size() != 3)
                throw ParseError("expected 'subject | relation | object', got " + std::to_string(fields.size()) +
                                     " fields",
                                 line_no, fields.size());
            Triple t;
            std::string* slots[] = {&t.subject, &t.relation, &t.object};
            for (std::size_t f = 0; f < 3; ++f) {
                *slots[f] = std::string(trim(fields[f]));
                if (slots[f]->empty()) throw ParseError("empty triple field", line_no, f + 1);
            }
            cur.triples.push_back(std::move(t));
        }
    }
    flush();
    return records;
}

std::map<std::string, std::string> parse_category_map(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (trim(raw).empty() || starts_with(trim(raw), "#")) continue;
        const auto tab = raw.find('\t');
        if (tab == std::string::npos) throw ParseError("expected entity<TAB>placeholder", line_no, 1);
        const auto entity = std::string(trim(std::string_view(raw).substr(0, tab)));
        const auto placeholder = std::string(trim(std::string_view(raw).substr(tab + 1)));
        if (entity.empty()) throw ParseError("empty entity", line_no, 1);
        if (placeholder.empty()) throw ParseError("empty placeholder", line_no, 2);
        out[entity] = placeholder;
    }
    return out;
}

Anonymised anonymise_sr(const LabeledGraph& g, const std::map<std::size_t, std::string>& types) {
    std::vector<Node> nodes = g.nodes();
    std::map<std::string, std::size_t> next_index;
    std::map<std::pair<std::string, std::string>, std::string> assigned;  // (type, label) -> placeholder
    RelexTable relex;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        auto it = types.find(v);
        if (it == types.end()) continue;
        const auto key = std::make_pair(it->second, nodes[v].label);
        auto found = assigned.find(key);
        if (found == assigned.end()) {
            auto placeholder = it->second + "_" + std::to_string(next_index[it->second]++);
            relex[placeholder] = nodes[v].label;
            found = assigned.emplace(key, std::move(placeholder)).first;
        }
        nodes[v].label = found->second;
    }
    return {LabeledGraph(g.id(), std::move(nodes), g.edges()), std::move(relex)};
}

namespace {

struct TupleText {
    std::string parent, label, child;
};

// Parses all "(a b c)" groups on one line.
std::vector<TupleText> parse_tuple_line(std::string_view line, std::size_t line_no) {
    std::vector<TupleText> out;
    std::size_t pos = 0;
    std::size_t field = 0;
    while (true) {
        pos = line.find_first_not_of(" \t\r", pos);
        if (pos == std::string_view::npos) break;
        ++field;
        if (line[pos] != '(') throw ParseError("expected '(' to open a tuple", line_no, field);
        const auto close = line.find(')', pos + 1);
        if (close == std::string_view::npos) throw ParseError("unterminated tuple", line_no, field);
        const auto parts = split_tokens(line.substr(pos + 1, close - pos - 1));
        if (parts.size() != 3)
            throw ParseError("tuple must have 3 fields (parent label child), got " + std::to_string(parts.size()),
                             line_no, field);
        out.push_back({parts[0], parts[1], parts[2]});
        pos = close + 1;
    }
    return out;
}

}  // namespace

LabeledGraph parse_sr11(std::string_view record, std::string id) {
    std::vector<Node> nodes;
    std::unordered_map<std::string, std::size_t> index;
    auto node_of = [&](const std::string& lemma) {
        auto [it, inserted] = index.emplace(lemma, nodes.size());
        if (inserted) nodes.push_back({lemma, {}});
        return it->second;
    };
    std::vector<Edge> edges;
    std::vector<std::pair<std::string, std::size_t>> feature_lines;

    std::size_t line_no = 0;
    for (const auto& raw : split_on(record, '\n')) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '(') {
            for (auto& t : parse_tuple_line(line, line_no)) {
                const auto p = node_of(t.parent);
                const auto c = node_of(t.child);
                edges.push_back({p, c, std::move(t.label)});
            }
        } else {
            feature_lines.emplace_back(std::string(line), line_no);
        }
    }
    if (edges.empty()) throw ParseError("no tuples", 1, 0);

    for (const auto& [text, no] : feature_lines) {
        const std::string_view line = text;
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) throw ParseError("expected lemma<TAB>features", no, 1);
        const auto lemma = std::string(trim(line.substr(0, tab)));
        auto it = index.find(lemma);
        if (it == index.end()) throw ParseError("features for unknown node '" + lemma + "'", no, 1);
        std::size_t field = 1;
        for (const auto& f : split_on(trim(line.substr(tab + 1)), ',')) {
            ++field;
            const auto feat = std::string(trim(f));
            if (feat.empty()) continue;
            if (!is_valid_feature(feat)) throw ParseError("malformed feature '" + feat + "'", no, field);
            nodes[it->second].features.push_back(feat);
        }
    }
    return LabeledGraph(std::move(id), std::move(nodes), std::move(edges));
}

std::vector<Sr11Record> parse_sr11_file(std::istream& in) {
    std::vector<Sr11Record> records;
    std::string body;
    Sr11Record cur;
    std::size_t line_no = 0;
    auto flush = [&] {
        if (cur.line != 0) {
            if (cur.id.empty()) cur.id = "sr11-" + std::to_string(records.size());
            try {
                cur.graph = parse_sr11(body, cur.id);
            } catch (const ParseError& e) {
                throw ParseError(std::string("record at line ") + std::to_string(cur.line) + ": " + e.what(),
                                 cur.line + e.line() - 1, e.field());
            }
            records.push_back(std::move(cur));
        }
        cur = {};
        body.clear();
    };
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) {
            flush();
            continue;
        }
        if (cur.line == 0) cur.line = line_no;
        if (starts_with(line, "# text:")) {
            cur.target = split_tokens(line.substr(7));
        } else if (starts_with(line, "# id:")) {
            cur.id = std::string(trim(line.substr(5)));
        } else if (starts_with(line, "# ne:")) {
            const auto rest = trim(line.substr(5));
            const auto sp = rest.find_first_of(" \t");
            if (sp == std::string_view::npos) throw ParseError("expected '# ne: TYPE lemma'", line_no, 2);
            cur.entity_types[std::string(trim(rest.substr(sp)))] = std::string(rest.substr(0, sp));
        }
        // keep line numbering aligned with the block for error positions
        body += raw;
        body += '\n';
    }
    flush();
    return records;
}

std::vector<std::string> linearise(const LabeledGraph& g, std::uint64_t rng_seed,
                                   const LinearisationOptions& options) {
    const std::size_t n = g.node_count();
    std::vector<std::string> tokens;
    if (n == 0) return tokens;

    std::vector<std::vector<std::size_t>> children(n);  // edge indices
    std::vector<std::size_t> in_degree(n, 0);
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        children.at(g.edges()[i].src).push_back(i);
        ++in_degree.at(g.edges()[i].dst);
    }

    Rng rng(rng_seed);
    std::vector<bool> visited(n, false);

    struct Frame {
        std::size_t node;
        std::vector<std::size_t> order;
        std::size_t next = 0;
    };
    auto expand = [&](std::size_t start) {
        std::vector<Frame> stack;
        auto push = [&](std::size_t v) {
            visited[v] = true;
            Frame f{v, children[v]};
            rng.shuffle(f.order);
            stack.push_back(std::move(f));
        };
        push(start);
        while (!stack.empty()) {
            auto& top = stack.back();
            if (top.next == top.order.size()) {
                stack.pop_back();
                continue;
            }
            const auto& e = g.edges()[top.order[top.next++]];
            if (options.emit_edge_labels) tokens.push_back(e.label);
            tokens.push_back(g.nodes()[e.dst].label);
            if (!visited[e.dst]) push(e.dst);
        }
    };
    auto start_from = [&](std::size_t v) {
        tokens.push_back(g.nodes()[v].label);
        expand(v);
    };

    bool any_root = false;
    for (std::size_t v = 0; v < n; ++v) {
        if (in_degree[v] == 0) {
            any_root = true;
            start_from(v);
        }
    }
    if (!any_root) start_from(0);
    // components reachable from no root (pure cycles)
    for (std::size_t v = 0; v < n; ++v)
        if (!visited[v]) start_from(v);
    return tokens;
}

DatasetSplit filter_long_targets(const DatasetSplit& split, std::size_t max_len) {
    DatasetSplit out{split.name, {}};
    for (const auto& ex : split.examples)
        if (ex.target.size() <= max_len) out.examples.push_back(ex);
    return out;
}

std::uint64_t example_seed(std::uint64_t global_seed, std::string_view example_id) {
    return mix_seed(global_seed ^ fnv1a64(example_id));
}

}  // namespace g2t
