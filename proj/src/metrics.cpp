#include "g2t/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "g2t/error.hpp"

namespace g2t {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const Tokens& tokens, std::size_t n) {
    NgramCounts counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
    return counts;
}

std::size_t closest_length(std::size_t hyp, const std::vector<Tokens>& refs) {
    std::size_t best = refs.front().size();
    for (const auto& r : refs) {
        const auto d = [&](std::size_t len) { return len > hyp ? len - hyp : hyp - len; };
        if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
    }
    return best;
}

}  // namespace

nlohmann::json BleuReport::to_json() const {
    return {{"bleu", bleu},
            {"precisions", precisions},
            {"matches", matches},
            {"totals", totals},
            {"brevity_penalty", brevity_penalty},
            {"hyp_length", hyp_length},
            {"ref_length", ref_length}};
}

BleuReport corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<std::vector<Tokens>>& references,
                       const BleuOptions& options) {
    if (hypotheses.size() != references.size())
        throw ContractViolation("corpus_bleu: " + std::to_string(hypotheses.size()) + " hypotheses but " +
                                std::to_string(references.size()) + " reference sets");
    if (options.max_n == 0) throw ContractViolation("corpus_bleu: max_n must be positive");
    BleuReport report;
    std::size_t longest = 0;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        if (references[i].empty()) throw ContractViolation("corpus_bleu: hypothesis " + std::to_string(i) + " has no reference");
        longest = std::max(longest, hypotheses[i].size());
        report.hyp_length += hypotheses[i].size();
        report.ref_length += closest_length(hypotheses[i].size(), references[i]);
    }
    const std::size_t orders = std::min(options.max_n, longest);
    report.matches.assign(orders, 0);
    report.totals.assign(orders, 0);
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        for (std::size_t n = 1; n <= orders; ++n) {
            const auto hyp = count_ngrams(hypotheses[i], n);
            NgramCounts max_ref;
            for (const auto& r : references[i])
                for (const auto& [gram, c] : count_ngrams(r, n)) max_ref[gram] = std::max(max_ref[gram], c);
            for (const auto& [gram, c] : hyp) {
                auto it = max_ref.find(gram);
                if (it != max_ref.end()) report.matches[n - 1] += std::min(c, it->second);
                report.totals[n - 1] += c;
            }
        }
    }
    if (report.hyp_length == 0) return report;
    report.brevity_penalty = report.hyp_length < report.ref_length
                                 ? std::exp(1.0 - static_cast<double>(report.ref_length) / report.hyp_length)
                                 : 1.0;
    double log_sum = 0.0;
    bool zero = false;
    for (std::size_t n = 0; n < orders; ++n) {
        double p = static_cast<double>(report.matches[n]) / report.totals[n];
        if (report.matches[n] == 0 && options.smooth) p = options.smooth_epsilon / report.totals[n];
        report.precisions.push_back(p);
        if (p == 0.0) zero = true;
        else log_sum += std::log(p);
    }
    report.bleu = zero ? 0.0 : report.brevity_penalty * std::exp(log_sum / orders);
    return report;
}

BleuReport corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
                       const BleuOptions& options) {
    std::vector<std::vector<Tokens>> refs;
    refs.reserve(references.size());
    for (const auto& r : references) refs.push_back({r});
    return corpus_bleu(hypotheses, refs, options);
}

double token_accuracy(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& gold,
                      const std::vector<bool>& mask) {
    if (predicted.size() != gold.size() || (!mask.empty() && mask.size() != gold.size()))
        throw ContractViolation("token_accuracy: shapes differ");
    std::size_t counted = 0, correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (!mask.empty() && !mask[i]) continue;
        ++counted;
        if (predicted[i] == gold[i]) ++correct;
    }
    return counted ? static_cast<double>(correct) / counted : 0.0;
}

}  // namespace g2t
