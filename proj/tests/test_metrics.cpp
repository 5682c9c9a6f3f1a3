#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "g2t/dataset.hpp"
#include "g2t/error.hpp"
#include "g2t/metrics.hpp"
#include "g2t/random.hpp"

using namespace g2t;

namespace {

struct Pairs {
    std::vector<Tokens> hyps, refs;
};

Pairs read_pairs(const std::string& name) {
    std::ifstream in(std::string(G2T_FIXTURE_DIR) + "/" + name);
    REQUIRE(in);
    Pairs p;
    std::string line;
    while (std::getline(in, line)) {
        const auto tab = line.find('\t');
        p.hyps.push_back(split_tokens(line.substr(0, tab)));
        p.refs.push_back(split_tokens(line.substr(tab + 1)));
    }
    return p;
}

nlohmann::json expected() {
    std::ifstream in(std::string(G2T_FIXTURE_DIR) + "/bleu_expected.json");
    return nlohmann::json::parse(in);
}

void check_against(const BleuReport& got, const nlohmann::json& want) {
    CHECK(std::abs(got.bleu - want.at("bleu").get<double>()) < 1e-4);
    CHECK(got.hyp_length == want.at("hyp_length").get<std::size_t>());
    CHECK(got.ref_length == want.at("ref_length").get<std::size_t>());
    CHECK(std::abs(got.brevity_penalty - want.at("brevity_penalty").get<double>()) < 1e-9);
    const auto p = want.at("precisions").get<std::vector<double>>();
    REQUIRE(got.precisions.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(got.precisions[i] - p[i]) < 1e-9);
}

}  // namespace

TEST_CASE("bleu: identical hypothesis scores 1, disjoint scores 0") {
    const Tokens s = split_tokens("the cat sat on the mat");
    auto same = corpus_bleu({s}, std::vector<Tokens>{s});
    CHECK(same.bleu == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(same.brevity_penalty == 1.0);
    auto disjoint = corpus_bleu({split_tokens("dogs bark loudly today")}, std::vector<Tokens>{s});
    CHECK(disjoint.bleu == 0.0);
}

TEST_CASE("bleu: short corpus averages only the available orders") {
    auto r = corpus_bleu({split_tokens("the cat")}, std::vector<Tokens>{split_tokens("the cat sat")});
    CHECK(r.precisions == std::vector<double>{1.0, 1.0});
    CHECK(r.brevity_penalty == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(std::abs(r.bleu - std::exp(-0.5)) < 1e-6);
}

TEST_CASE("bleu: clipping, closest reference and empty hypotheses") {
    // "the the the" against "the cat": unigram matches clipped to 1
    auto r = corpus_bleu({split_tokens("the the the")}, std::vector<Tokens>{split_tokens("the cat")},
                         BleuOptions{1});
    CHECK(r.matches[0] == 1);
    CHECK(r.totals[0] == 3);
    // closest reference length, ties to the shorter
    std::vector<std::vector<Tokens>> refs = {{split_tokens("a b c d e"), split_tokens("a b c")}};
    CHECK(corpus_bleu({split_tokens("a b c d")}, refs).ref_length == 3);
    auto empty = corpus_bleu({Tokens{}, split_tokens("a b")}, std::vector<Tokens>{split_tokens("x"), split_tokens("a b")});
    CHECK(empty.hyp_length == 2);
    auto all_empty = corpus_bleu({Tokens{}}, std::vector<Tokens>{split_tokens("x y")});
    CHECK(all_empty.bleu == 0.0);
}

TEST_CASE("bleu: errors") {
    CHECK_THROWS_AS(corpus_bleu({Tokens{"a"}}, std::vector<Tokens>{}), ContractViolation);
    CHECK_THROWS_AS(corpus_bleu({Tokens{"a"}}, std::vector<std::vector<Tokens>>{{}}), ContractViolation);
}

TEST_CASE("bleu: 50-pair fixture matches the committed reference scores") {
    auto p = read_pairs("bleu_50.tsv");
    REQUIRE(p.hyps.size() == 50);
    const auto want = expected().at("bleu_50");
    check_against(corpus_bleu(p.hyps, p.refs), want.at("unsmoothed"));
    check_against(corpus_bleu(p.hyps, p.refs, {4, true, 0.1}), want.at("floor_0.1"));
}

TEST_CASE("bleu: smoothing on a corpus without 4-gram matches") {
    auto p = read_pairs("bleu_sparse.tsv");
    const auto want = expected().at("bleu_sparse");
    auto plain = corpus_bleu(p.hyps, p.refs);
    CHECK(plain.bleu == 0.0);
    check_against(plain, want.at("unsmoothed"));
    check_against(corpus_bleu(p.hyps, p.refs, {4, true, 0.1}), want.at("floor_0.1"));
}

TEST_CASE("property: bleu is invariant to pair order and 1 on self-reference") {
    auto p = read_pairs("bleu_50.tsv");
    const double base = corpus_bleu(p.hyps, p.refs).bleu;
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::size_t> order(p.hyps.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        std::vector<Tokens> h, r;
        for (auto i : order) {
            h.push_back(p.hyps[i]);
            r.push_back(p.refs[i]);
        }
        CHECK(corpus_bleu(h, r).bleu == doctest::Approx(base).epsilon(1e-14));
    }
    for (const auto& h : p.hyps) CHECK(corpus_bleu({h}, std::vector<Tokens>{h}).bleu == doctest::Approx(1.0));
}

TEST_CASE("property: shortening hypotheses never increases the brevity penalty") {
    auto p = read_pairs("bleu_50.tsv");
    double previous = corpus_bleu(p.hyps, p.refs).brevity_penalty;
    for (int round = 0; round < 4; ++round) {
        for (auto& h : p.hyps)
            if (h.size() > 1) h.pop_back();
        const double bp = corpus_bleu(p.hyps, p.refs).brevity_penalty;
        CHECK(bp <= previous);
        previous = bp;
    }
}

TEST_CASE("token_accuracy") {
    CHECK(token_accuracy({1, 2, 3}, {1, 2, 3}) == 1.0);
    CHECK(token_accuracy({4, 5, 6}, {1, 2, 3}) == 0.0);
    CHECK(token_accuracy({1, 2, 9, 4, 7}, {1, 2, 3, 4, 0}, {true, true, true, true, false}) == 0.75);
    CHECK(token_accuracy({}, {}) == 0.0);
    CHECK_THROWS_AS(token_accuracy({1}, {1, 2}), ContractViolation);
}
