#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace g2t {

using Tokens = std::vector<std::string>;

struct BleuOptions {
    std::size_t max_n = 4;
    /// Zero n-gram match counts become epsilon / total ("floor" smoothing).
    bool smooth = false;
    double smooth_epsilon = 0.1;
};

struct BleuReport {
    double bleu = 0.0;
    /// One entry per order actually used (may be fewer than max_n).
    std::vector<double> precisions;
    std::vector<std::size_t> matches;
    std::vector<std::size_t> totals;
    double brevity_penalty = 0.0;
    std::size_t hyp_length = 0;
    std::size_t ref_length = 0;

    nlohmann::json to_json() const;
};

/// Corpus BLEU with clipped counts and closest-reference length (ties to the
/// shorter). When the longest hypothesis is shorter than max_n, only the
/// orders it can contain are averaged. Throws ContractViolation when the
/// lists differ in length or a hypothesis has no reference.
BleuReport corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<std::vector<Tokens>>& references,
                       const BleuOptions& options = {});
BleuReport corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
                       const BleuOptions& options = {});

/// Fraction of unmasked positions with predicted == gold; 0 when nothing is
/// unmasked. An empty mask means every position counts.
double token_accuracy(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& gold,
                      const std::vector<bool>& mask = {});

}  // namespace g2t
