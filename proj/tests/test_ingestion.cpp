#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "g2t/error.hpp"
#include "g2t/ingestion.hpp"
#include "g2t/random.hpp"

using namespace g2t;

namespace {

std::size_t count_label(const std::vector<std::string>& tokens, const std::string& label) {
    return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), label));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Recursive reference DFS: `choose` receives the child edge list of a node and
// returns it in the order to traverse.
using Chooser = std::function<std::vector<std::size_t>(std::vector<std::size_t>)>;

void reference_visit(const LabeledGraph& g, std::size_t v, std::vector<bool>& seen, std::vector<std::string>& out,
                     const Chooser& choose) {
    seen[v] = true;
    std::vector<std::size_t> kids;
    for (std::size_t i = 0; i < g.edge_count(); ++i)
        if (g.edges()[i].src == v) kids.push_back(i);
    for (auto e : choose(kids)) {
        out.push_back(g.edges()[e].label);
        out.push_back(g.nodes()[g.edges()[e].dst].label);
        if (!seen[g.edges()[e].dst]) reference_visit(g, g.edges()[e].dst, seen, out, choose);
    }
}

std::vector<std::string> reference_linearise(const LabeledGraph& g, const Chooser& choose) {
    std::vector<bool> seen(g.node_count(), false);
    std::vector<std::string> out;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        if (g.in_degree(v) == 0) {
            out.push_back(g.nodes()[v].label);
            reference_visit(g, v, seen, out, choose);
        }
    }
    return out;
}

}  // namespace

// ---- reify ----------------------------------------------------------------

TEST_CASE("reify: empty input gives an empty graph that fails validation") {
    const auto g = reify({});
    CHECK(g.node_count() == 0);
    CHECK(g.edge_count() == 0);
    CHECK_FALSE(validate_graph(g).ok());
}

TEST_CASE("reify: (Aenir precededBy Castle)") {
    const auto g = reify({{"Aenir", "precededBy", "Castle"}});
    REQUIRE(g.node_count() == 3);
    CHECK(g.nodes()[0].label == "Aenir");
    CHECK(g.nodes()[1].label == "Castle");
    CHECK(g.nodes()[2].label == "precededBy");
    REQUIRE(g.edge_count() == 2);
    CHECK(g.edges()[0] == Edge{2, 0, "A0"});
    CHECK(g.edges()[1] == Edge{2, 1, "A1"});
}

TEST_CASE("reify: repeated relation names get distinct relation nodes") {
    const auto g = reify({{"a", "r", "b"}, {"c", "r", "d"}});
    CHECK(g.node_count() == 6);
    CHECK(g.edge_count() == 4);
    std::size_t relation_nodes = 0;
    for (std::size_t v = 0; v < g.node_count(); ++v) relation_nodes += is_relation_node(g, v);
    CHECK(relation_nodes == 2);
    CHECK(g.nodes()[4].label == "r");
    CHECK(g.nodes()[5].label == "r");
}

// ---- split_multiword_entities ---------------------------------------------

TEST_CASE("split: single-word entity unchanged") {
    const auto g = reify({{"Aenir", "precededBy", "Castle"}});
    CHECK(split_multiword_entities(g) == g);
}

TEST_CASE("split: Into Battle becomes (Into NE Battle)") {
    const auto g = split_multiword_entities(reify({{"Into Battle", "followedBy", "Aenir"}}));
    REQUIRE(g.node_count() == 4);
    CHECK(g.nodes()[0].label == "Into");
    CHECK(g.nodes()[1].label == "Battle");
    bool found = false;
    for (const auto& e : g.edges()) found |= e == Edge{0, 1, "NE"};
    CHECK(found);
}

TEST_CASE("split: Above the Veil chain, external edges on the head word") {
    const auto before = reify({{"Above the Veil", "precededBy", "Aenir"}});
    const auto g = split_multiword_entities(before);
    CHECK(g.node_count() == before.node_count() + 2);
    std::size_t ne = 0;
    for (const auto& e : g.edges()) ne += e.label == "NE";
    CHECK(ne == 2);
    CHECK(g.nodes()[0].label == "Above");
    CHECK(g.nodes()[1].label == "the");
    CHECK(g.nodes()[2].label == "Veil");
    // relation node keeps its A0 edge, now pointing at "Above"
    const auto rel = g.node_count() - 1;
    CHECK(g.nodes()[rel].label == "precededBy");
    CHECK(std::count(g.edges().begin(), g.edges().end(), Edge{rel, 0, "A0"}) == 1);
    CHECK(validate_graph(g).ok());
}

TEST_CASE("split: relation labels with spaces are never split") {
    const auto g = split_multiword_entities(reify({{"William Anders", "was a crew member of", "Apollo 8"}}));
    std::size_t relation_nodes = 0;
    for (std::size_t v = 0; v < g.node_count(); ++v)
        if (g.nodes()[v].label == "was a crew member of") ++relation_nodes;
    CHECK(relation_nodes == 1);
    CHECK(g.node_count() == 5);
}

TEST_CASE("property: NE chains recover the original entity strings") {
    Rng rng(3);
    const std::vector<std::string> words = {"New", "York", "Apollo", "8", "the", "Veil"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Triple> triples;
        std::set<std::string> entities;
        const auto n = 1 + rng.index(4);
        for (std::size_t i = 0; i < n; ++i) {
            auto make = [&] {
                std::string s = words[rng.index(words.size())];
                const auto extra = rng.index(3);
                for (std::size_t k = 0; k < extra; ++k) s += " " + words[rng.index(words.size())];
                return s;
            };
            Triple t{make(), "rel" + std::to_string(rng.index(3)), make()};
            entities.insert(t.subject);
            entities.insert(t.object);
            triples.push_back(t);
        }
        const auto g = split_multiword_entities(reify(triples));
        CHECK(validate_graph(g).ok());
        // walk chains from heads: nodes without incoming NE edge that are not relation nodes
        std::set<std::string> recovered;
        for (std::size_t v = 0; v < g.node_count(); ++v) {
            if (is_relation_node(g, v)) continue;
            bool has_ne_in = false;
            for (const auto& e : g.edges()) has_ne_in |= e.dst == v && e.label == "NE";
            if (has_ne_in) continue;
            std::string s = g.nodes()[v].label;
            std::size_t cur = v;
            while (true) {
                auto it = std::find_if(g.edges().begin(), g.edges().end(),
                                       [&](const Edge& e) { return e.src == cur && e.label == "NE"; });
                if (it == g.edges().end()) break;
                cur = it->dst;
                s += " " + g.nodes()[cur].label;
            }
            recovered.insert(s);
        }
        CHECK(recovered == entities);
    }
}

// ---- delexicalisation ----------------------------------------------------

TEST_CASE("delexicalise: empty category map is the identity") {
    const std::vector<Triple> triples = {{"Apollo 8", "operator", "NASA"}};
    const std::vector<std::string> target = {"Apollo", "8", "was", "run", "by", "NASA"};
    const auto d = delexicalise(triples, target, {});
    CHECK(d.triples == triples);
    CHECK(d.target == target);
    CHECK(d.relex.empty());
}

TEST_CASE("delexicalise: Apollo 8 -> MISSION on both sides") {
    const std::vector<Triple> triples = {{"Apollo 8", "operator", "NASA"}};
    const std::vector<std::string> target = {"Apollo", "8", "was", "run", "by", "NASA", "."};
    const auto d = delexicalise(triples, target, {{"Apollo 8", "MISSION"}});
    CHECK(d.triples[0].subject == "MISSION");
    CHECK(d.triples[0].object == "NASA");
    CHECK(d.target == std::vector<std::string>{"MISSION", "was", "run", "by", "NASA", "."});
    CHECK(d.relex == RelexTable{{"MISSION", "Apollo 8"}});
}

TEST_CASE("delexicalise: longest entity wins") {
    const std::vector<Triple> triples = {{"Apollo 8", "crew", "Apollo"}};
    const auto d = delexicalise(triples, {"Apollo", "8", "and", "Apollo"}, {{"Apollo 8", "MISSION"}, {"Apollo", "PROGRAM"}});
    CHECK(d.target == std::vector<std::string>{"MISSION", "and", "PROGRAM"});
}

TEST_CASE("delexicalise: placeholder collision is an error") {
    const std::vector<Triple> triples = {{"NASA", "partner", "ESA"}};
    CHECK_THROWS_AS(delexicalise(triples, {}, {{"NASA", "OPERATOR"}, {"ESA", "OPERATOR"}}), DataError);
}

TEST_CASE("relexicalise restores surface strings") {
    const auto out = relexicalise({"run", "by", "OPERATOR", "."}, {{"OPERATOR", "NASA"}});
    CHECK(join_tokens(out) == "run by NASA .");
    CHECK(join_tokens(relexicalise({"MISSION", "flew"}, {{"MISSION", "Apollo 8"}})) == "Apollo 8 flew");
}

// ---- anonymisation --------------------------------------------------------

TEST_CASE("anonymise_sr") {
    LabeledGraph g("x", {{"Smith", {}}, {"Paris", {}}, {"Jones", {}}, {"say", {}}}, {{3, 0, "A0"}});
    SUBCASE("no typed nodes is the identity") {
        const auto a = anonymise_sr(g, {});
        CHECK(a.graph == g);
        CHECK(a.relex.empty());
    }
    SUBCASE("two persons -> PER_0, PER_1") {
        const auto a = anonymise_sr(g, {{0, "PER"}, {2, "PER"}});
        CHECK(a.graph.nodes()[0].label == "PER_0");
        CHECK(a.graph.nodes()[2].label == "PER_1");
        CHECK(a.relex.at("PER_1") == "Jones");
    }
    SUBCASE("person, location, person") {
        const auto a = anonymise_sr(g, {{0, "PER"}, {1, "LOC"}, {2, "PER"}});
        CHECK(a.graph.nodes()[0].label == "PER_0");
        CHECK(a.graph.nodes()[1].label == "LOC_0");
        CHECK(a.graph.nodes()[2].label == "PER_1");
        CHECK(a.graph.edges() == g.edges());
    }
}

// ---- SR11 -----------------------------------------------------------------

TEST_CASE("parse_sr11: small record") {
    const auto g = parse_sr11("(SROOT SROOT will) (will P .)");
    REQUIRE(g.node_count() == 3);
    CHECK(g.nodes()[0].label == "SROOT");
    CHECK(g.nodes()[1].label == "will");
    CHECK(g.nodes()[2].label == ".");
    REQUIRE(g.edge_count() == 2);
    CHECK(g.edges()[0] == Edge{0, 1, "SROOT"});
    CHECK(g.edges()[1] == Edge{1, 2, "P"});
}

TEST_CASE("parse_sr11: empty record") {
    try {
        parse_sr11("");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("no tuples") != std::string::npos);
    }
}

TEST_CASE("parse_sr11: malformed tuples report position") {
    try {
        parse_sr11("(SROOT SROOT will)\n(will P . extra)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.field() == 1);
    }
    try {
        parse_sr11("(SROOT SROOT will) (will P .");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.field() == 2);
    }
    CHECK_THROWS_AS(parse_sr11("(a b c)\nc\tnum"), ParseError);
    CHECK_THROWS_AS(parse_sr11("(a b c)\nzzz\tnum=sg"), ParseError);
}

TEST_CASE("parse_sr11: features attach to nodes") {
    const auto g = parse_sr11("(SROOT SROOT be) (be P ?)\nbe\tnum=sg,tense=pres\n?\tbracket=r");
    CHECK(g.nodes()[1].features == std::vector<std::string>{"num=sg", "tense=pres"});
    CHECK(g.nodes()[2].features == std::vector<std::string>{"bracket=r"});
}

TEST_CASE("parse_sr11: the printed Table 3 record has 24 tuples") {
    const auto text = read_file(G2T_FIXTURE_DIR "/sr11_table3.txt");
    const auto g = parse_sr11(text);
    // counted directly in the printed record
    std::size_t tuples = static_cast<std::size_t>(std::count(text.begin(), text.end(), '('));
    CHECK(tuples == 24);
    CHECK(g.edge_count() == tuples);
    CHECK(validate_graph(g).ok());

    std::istringstream in(text);
    const auto records = parse_sr11_file(in);
    REQUIRE(records.size() == 1);
    CHECK(records[0].id == "table3-sr11");
    CHECK(records[0].graph.edge_count() == 24);
    CHECK(records[0].target.size() == 25);
}

TEST_CASE("parse_sr11_file: ne lines and errors with file line numbers") {
    std::istringstream in("# id: a\n(SROOT SROOT say) (say A0 Smith)\n# ne: PER Smith\n# text: Smith said .\n\n"
                          "# id: b\n(SROOT SROOT be)\n(be oops)\n");
    try {
        parse_sr11_file(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 8);
    }
    std::istringstream ok("(SROOT SROOT say) (say A0 Smith)\n# ne: PER Smith\n");
    const auto recs = parse_sr11_file(ok);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].entity_types.at("Smith") == "PER");
}

// ---- WebNLG text format ---------------------------------------------------

TEST_CASE("parse_webnlg") {
    std::istringstream in(
        "# id: e1\nAenir | precededBy | Castle\n# text: Aenir came after Castle .\n\n"
        "Above the Veil | country | Australians\nAbove the Veil | followedBy | Into Battle\n"
        "# text: Above the Veil is Australian .\n");
    const auto recs = parse_webnlg(in);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].id == "e1");
    CHECK(recs[0].triples == std::vector<Triple>{{"Aenir", "precededBy", "Castle"}});
    CHECK(recs[0].target.size() == 5);
    CHECK(recs[1].id == "webnlg-1");
    CHECK(recs[1].triples.size() == 2);
    CHECK(recs[1].line == 5);

    std::istringstream bad("a | b\n");
    CHECK_THROWS_AS(parse_webnlg(bad), ParseError);
    std::istringstream empty_field("a |  | c\n");
    try {
        parse_webnlg(empty_field);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.field() == 2);
    }
}

TEST_CASE("parse_category_map") {
    std::istringstream in("Apollo 8\tMISSION\nNASA\tOPERATOR\n");
    const auto m = parse_category_map(in);
    CHECK(m.at("Apollo 8") == "MISSION");
    CHECK(m.at("NASA") == "OPERATOR");
    std::istringstream bad("no tab here\n");
    CHECK_THROWS_AS(parse_category_map(bad), ParseError);
}

// ---- linearisation -------------------------------------------------------

TEST_CASE("linearise: single node") {
    LabeledGraph g("x", {{"x", {}}}, {});
    CHECK(linearise(g, 1) == std::vector<std::string>{"x"});
}

TEST_CASE("linearise: chain is seed independent") {
    LabeledGraph g("x", {{"a", {}}, {"b", {}}, {"c", {}}}, {{0, 1, "r"}, {1, 2, "s"}});
    const std::vector<std::string> expected = {"a", "r", "b", "s", "c"};
    const auto oracle = reference_linearise(g, [](auto kids) { return kids; });
    CHECK(oracle == expected);
    for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(linearise(g, seed) == expected);
    LinearisationOptions no_labels;
    no_labels.emit_edge_labels = false;
    CHECK(linearise(g, 3, no_labels) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("linearise: diamond repeats the shared child") {
    LabeledGraph g("x", {{"a", {}}, {"b", {}}, {"c", {}}, {"d", {}}},
                   {{0, 1, "r"}, {0, 2, "r"}, {1, 3, "r"}, {2, 3, "r"}});
    // brute force over both sibling orders at the root
    const auto forward = reference_linearise(g, [](auto kids) { return kids; });
    const auto reversed = reference_linearise(g, [](auto kids) {
        std::reverse(kids.begin(), kids.end());
        return kids;
    });
    CHECK(count_label(forward, "d") == 2);
    CHECK(count_label(reversed, "d") == 2);
    std::set<std::vector<std::string>> seen;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto out = linearise(g, seed);
        CHECK((out == forward || out == reversed));
        CHECK(count_label(out, "d") == 2);
        seen.insert(out);
    }
    CHECK(seen.size() == 2);  // both orders are reachable from some seed
}

TEST_CASE("linearise: cycle without roots starts from node 0") {
    LabeledGraph g("x", {{"a", {}}, {"b", {}}}, {{0, 1, "r"}, {1, 0, "s"}});
    CHECK(linearise(g, 0) == std::vector<std::string>{"a", "r", "b", "s", "a"});
}

TEST_CASE("linearise: unreachable cycle next to a root is still emitted") {
    LabeledGraph g("x", {{"a", {}}, {"b", {}}, {"c", {}}}, {{1, 2, "r"}, {2, 1, "r"}});
    const auto out = linearise(g, 0);
    CHECK(count_label(out, "a") == 1);
    CHECK(count_label(out, "b") >= 1);
    CHECK(count_label(out, "c") >= 1);
}

TEST_CASE("linearise: Table 3 record keeps every lemma") {
    const auto g = parse_sr11(read_file(G2T_FIXTURE_DIR "/sr11_table3.txt"));
    const auto out = linearise(g, 7);
    for (const auto& n : g.nodes()) CHECK(count_label(out, n.label) >= 1);
    CHECK(out.front() == "SROOT");
    CHECK(linearise(g, 7) == out);
}

// ---- filtering ------------------------------------------------------------

TEST_CASE("filter_long_targets") {
    auto make = [](std::size_t len, const std::string& id) {
        Example ex;
        ex.graph = LabeledGraph(id, {{"x", {}}}, {});
        ex.target.assign(len, "w");
        return ex;
    };
    DatasetSplit split{"train", {make(50, "a")}};
    CHECK(filter_long_targets(split).examples.size() == 1);
    split.examples = {make(51, "a")};
    CHECK(filter_long_targets(split).examples.empty());
    split.examples = {make(10, "a"), make(51, "b"), make(50, "c")};
    const auto out = filter_long_targets(split);
    REQUIRE(out.examples.size() == 2);
    CHECK(out.examples[0].id() == "a");
    CHECK(out.examples[1].id() == "c");
    CHECK(out.name == "train");
}

TEST_CASE("example_seed depends on id and global seed") {
    CHECK(example_seed(1, "a") == example_seed(1, "a"));
    CHECK(example_seed(1, "a") != example_seed(1, "b"));
    CHECK(example_seed(1, "a") != example_seed(2, "a"));
}
