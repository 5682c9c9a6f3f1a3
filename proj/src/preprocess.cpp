#include "g2t/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "g2t/error.hpp"
#include "g2t/model.hpp"
#include "g2t/synthetic.hpp"

namespace g2t {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSplits[] = {"train", "dev", "test"};

// Published corpus sizes; deviations are reported, never enforced.
struct Published {
    std::size_t train, dev, test, relations;
};
constexpr Published kWebNlg{18102, 871, 971, 373};
constexpr Published kSr11{39279, 1034, 2398, 117};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> lower(std::vector<std::string> v) {
    for (auto& s : v) s = lower(std::move(s));
    return v;
}

std::ifstream open_input(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot read " + p.string());
    return in;
}

struct Converted {
    std::vector<Example> examples;
    std::map<std::string, RelexTable> relex;
    std::set<std::string> relations;
};

Converted convert_webnlg(const fs::path& path, const PreprocessOptions& o,
                         const std::map<std::string, std::string>& categories) {
    auto in = open_input(path);
    std::vector<WebNlgRecord> records;
    try {
        records = parse_webnlg(in);
    } catch (const ParseError& e) {
        throw DataError(path.string() + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    Converted c;
    for (auto& r : records) {
        if (r.target.empty())
            throw DataError(path.string() + ":" + std::to_string(r.line) + ": record '" + r.id + "' has no # text: line");
        if (o.lowercase) {
            for (auto& t : r.triples) {
                t.subject = lower(t.subject);
                t.object = lower(t.object);
            }
            r.target = lower(r.target);
        }
        for (const auto& t : r.triples) c.relations.insert(t.relation);
        Delexicalised d{r.triples, r.target, {}};
        if (!categories.empty()) {
            try {
                d = delexicalise(r.triples, r.target, categories);
            } catch (const DataError& e) {
                throw DataError(path.string() + ":" + std::to_string(r.line) + ": " + e.what());
            }
        }
        LabeledGraph g = reify(d.triples, r.id);
        if (o.split_entities) g = split_multiword_entities(g);
        if (!d.relex.empty()) c.relex[r.id] = d.relex;
        c.examples.push_back({std::move(g), std::move(d.target), {}});
    }
    return c;
}

Converted convert_sr11(const fs::path& path, const PreprocessOptions& o) {
    auto in = open_input(path);
    std::vector<Sr11Record> records;
    try {
        records = parse_sr11_file(in);
    } catch (const ParseError& e) {
        throw DataError(path.string() + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    Converted c;
    for (auto& r : records) {
        if (r.target.empty())
            throw DataError(path.string() + ":" + std::to_string(r.line) + ": record '" + r.id + "' has no # text: line");
        std::map<std::size_t, std::string> types;
        std::vector<Node> nodes = r.graph.nodes();
        for (std::size_t v = 0; v < nodes.size(); ++v) {
            auto it = r.entity_types.find(nodes[v].label);
            if (it != r.entity_types.end()) types[v] = it->second;
            if (o.lowercase) nodes[v].label = lower(nodes[v].label);
        }
        LabeledGraph g(r.graph.id(), std::move(nodes), r.graph.edges());
        for (const auto& e : g.edges()) c.relations.insert(e.label);
        auto target = o.lowercase ? lower(r.target) : r.target;
        if (!types.empty()) {
            auto a = anonymise_sr(g, types);
            g = std::move(a.graph);
            // the text still carries the surface forms; swap them for the placeholders
            std::map<std::string, std::string> to_placeholder;
            for (const auto& [placeholder, surface] : a.relex)
                to_placeholder[o.lowercase ? lower(surface) : surface] = placeholder;
            for (auto& tok : target) {
                auto it = to_placeholder.find(tok);
                if (it != to_placeholder.end()) tok = it->second;
            }
            c.relex[r.id] = a.relex;
        }
        c.examples.push_back({std::move(g), std::move(target), {}});
    }
    return c;
}

Converted convert_synthetic(std::size_t count, std::uint64_t seed, const std::string& split) {
    Converted c;
    c.examples = synthetic_corpus(count, seed);
    for (auto& ex : c.examples) {
        LabeledGraph g(split + "-" + ex.id(), ex.graph.nodes(), ex.graph.edges());
        ex.graph = std::move(g);
        for (const auto& e : ex.graph.edges()) c.relations.insert(e.label);
    }
    return c;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw DataError("cannot write " + p.string());
    out << j.dump(2) << '\n';
}

}  // namespace

Task parse_task(std::string_view s) {
    if (s == "webnlg") return Task::webnlg;
    if (s == "sr11") return Task::sr11;
    if (s == "synthetic") return Task::synthetic;
    throw ConfigError("unknown task '" + std::string(s) + "' (webnlg, sr11, synthetic)");
}

std::string_view to_string(Task t) {
    switch (t) {
        case Task::webnlg: return "webnlg";
        case Task::sr11: return "sr11";
        case Task::synthetic: return "synthetic";
    }
    return "?";
}

nlohmann::json SplitStats::to_json() const {
    return {{"name", name}, {"read", read}, {"kept", kept}, {"filtered", filtered}, {"relations", relations}};
}

nlohmann::json PreprocessReport::to_json() const {
    nlohmann::json splits_json = nlohmann::json::array();
    for (const auto& s : splits) splits_json.push_back(s.to_json());
    return {{"task", task}, {"splits", splits_json}, {"relations", relations}, {"warnings", warnings}};
}

std::map<std::string, RelexTable> read_relex_tables(const fs::path& path) {
    auto in = open_input(path);
    try {
        return nlohmann::json::parse(in).get<std::map<std::string, RelexTable>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

PreprocessReport preprocess(const PreprocessOptions& o) {
    if (o.max_target_len == 0) throw ConfigError("max target length must be positive");
    std::vector<std::pair<std::string, fs::path>> inputs;
    if (o.task == Task::synthetic) {
        for (const char* s : kSplits) inputs.emplace_back(s, fs::path());
    } else if (fs::is_directory(o.input)) {
        for (const char* s : kSplits)
            if (fs::exists(o.input / (std::string(s) + ".txt"))) inputs.emplace_back(s, o.input / (std::string(s) + ".txt"));
        if (inputs.empty()) throw DataError(o.input.string() + ": no train.txt, dev.txt or test.txt");
    } else {
        if (!fs::exists(o.input)) throw DataError("input not found: " + o.input.string());
        inputs.emplace_back(o.split, o.input);
    }

    std::map<std::string, std::string> categories;
    if (o.categories) {
        auto in = open_input(*o.categories);
        try {
            categories = parse_category_map(in);
        } catch (const ParseError& e) {
            throw DataError(o.categories->string() + ":" + std::to_string(e.line()) + ": " + e.what());
        }
        if (o.lowercase) {
            std::map<std::string, std::string> low;
            for (const auto& [k, v] : categories) low[lower(k)] = v;
            categories = std::move(low);
        }
    }

    fs::create_directories(o.out);
    PreprocessReport report;
    report.task = std::string(to_string(o.task));
    std::set<std::string> all_relations;
    std::vector<Example> train;
    for (const auto& [name, path] : inputs) {
        Converted c;
        switch (o.task) {
            case Task::webnlg: c = convert_webnlg(path, o, categories); break;
            case Task::sr11: c = convert_sr11(path, o); break;
            case Task::synthetic: {
                const std::size_t n = name == "train" ? o.synthetic_train
                                      : name == "dev" ? o.synthetic_dev
                                                      : o.synthetic_test;
                c = convert_synthetic(n, example_seed(o.seed, name), name);
                break;
            }
        }
        for (const auto& ex : c.examples) {
            auto v = validate_graph(ex.graph);
            if (!v.ok())
                throw DataError((path.empty() ? name : path.string()) + ": example '" + ex.id() +
                                "': " + v.violations.front().message);
        }
        SplitStats stats;
        stats.name = name;
        stats.read = c.examples.size();
        stats.relations = c.relations.size();
        all_relations.insert(c.relations.begin(), c.relations.end());
        auto kept = filter_long_targets({name, std::move(c.examples)}, o.max_target_len).examples;
        stats.kept = kept.size();
        stats.filtered = stats.read - stats.kept;
        if (o.linearise) {
            LinearisationOptions lo;
            lo.emit_edge_labels = o.edge_labels;
            for (auto& ex : kept) ex.linearised = linearise(ex.graph, example_seed(o.seed, ex.id()), lo);
        }

        const fs::path jsonl = o.out / (name + ".jsonl");
        write_jsonl(jsonl, kept);
        report.artifacts.push_back(jsonl);
        std::map<std::string, RelexTable> relex;
        for (const auto& ex : kept)
            if (auto it = c.relex.find(ex.id()); it != c.relex.end()) relex.insert(*it);
        if (!relex.empty()) {
            const fs::path rp = o.out / (name + ".relex.json");
            write_json(rp, relex);
            report.artifacts.push_back(rp);
        }
        if (name == "train") train = std::move(kept);
        report.splits.push_back(stats);
    }
    report.relations = all_relations.size();

    if (o.task != Task::synthetic) {
        const Published& pub = o.task == Task::webnlg ? kWebNlg : kSr11;
        const char* what = o.task == Task::webnlg ? "distinct relations" : "distinct dependency relations";
        if (report.relations != pub.relations)
            report.warnings.push_back(std::to_string(report.relations) + " " + what + " (published corpus: " +
                                      std::to_string(pub.relations) + ")");
        for (const auto& s : report.splits) {
            const std::size_t expected = s.name == "train" ? pub.train : s.name == "dev" ? pub.dev : pub.test;
            if (s.kept != expected)
                report.warnings.push_back(s.name + ": " + std::to_string(s.kept) + " examples (published corpus: " +
                                          std::to_string(expected) + ")");
        }
    }
    for (const auto& s : report.splits)
        if (s.filtered)
            report.warnings.push_back(s.name + ": " + std::to_string(s.filtered) + " example(s) with more than " +
                                      std::to_string(o.max_target_len) + " target tokens filtered");

    if (!train.empty()) {
        const fs::path vp = o.out / "vocab.json";
        write_json(vp, Vocabularies::build(train, o.min_count).to_json());
        report.artifacts.push_back(vp);
    }
    const fs::path sp = o.out / "stats.json";
    write_json(sp, report.to_json());
    report.artifacts.push_back(sp);
    return report;
}

}  // namespace g2t
