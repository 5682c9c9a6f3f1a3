#include "g2t/synthetic.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>

#include "g2t/random.hpp"

namespace g2t {

namespace {

constexpr std::array<const char*, 12> kEntities = {"Aenir", "Castle", "Garth", "Nix",   "Alba",  "Tarn",
                                                   "Oslo",  "Ruth",   "Kade",  "Lumen", "Pella", "Vito"};
constexpr std::array<const char*, 4> kRelations = {"author", "precededBy", "country", "leader"};

}  // namespace

std::vector<std::string> synthetic_target(const LabeledGraph& graph) {
    std::vector<std::tuple<std::string, std::string, std::string>> facts;
    for (const auto& e : graph.edges()) facts.emplace_back(graph.node(e.src).label, e.label, graph.node(e.dst).label);
    std::sort(facts.begin(), facts.end());
    std::vector<std::string> out;
    for (const auto& [s, r, o] : facts) {
        out.push_back(s);
        out.push_back(r);
        out.push_back(o);
    }
    out.emplace_back(".");
    return out;
}

std::vector<Example> synthetic_corpus(std::size_t count, std::uint64_t seed) {
    const Rng root = Rng(seed).stream("synthetic");
    std::vector<Example> out;
    for (std::size_t k = 0; k < count; ++k) {
        Rng rng = root.stream(k);
        std::vector<std::size_t> pick(kEntities.size());
        for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
        rng.shuffle(pick);
        std::vector<Node> nodes;
        for (std::size_t i = 0; i < 4; ++i) nodes.push_back({kEntities[pick[i]], {}});

        const std::size_t n_edges = 2 + rng.index(2);
        std::set<std::pair<std::size_t, std::size_t>> used;
        std::vector<Edge> edges;
        while (edges.size() < n_edges) {
            const std::size_t s = rng.index(4), d = rng.index(4);
            if (s == d || used.count({s, d}) || used.count({d, s})) continue;
            used.insert({s, d});
            edges.push_back({s, d, kRelations[rng.index(kRelations.size())]});
        }
        LabeledGraph g("syn" + std::to_string(k), std::move(nodes), std::move(edges));
        auto target = synthetic_target(g);
        out.push_back({std::move(g), std::move(target), {}});
    }
    return out;
}

}  // namespace g2t
