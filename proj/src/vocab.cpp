#include "g2t/vocab.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "g2t/error.hpp"
#include "g2t/random.hpp"

namespace g2t {

namespace {
constexpr const char* kUnkToken = "<unk>";
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Vocabulary Vocabulary::tokens() { return from_tokens({"<pad>", "<s>", "</s>", kUnkToken}); }

Vocabulary Vocabulary::labels() { return from_tokens({kUnkToken, "self"}); }

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
    Vocabulary v;
    for (auto& t : tokens) v.add(t);
    v.unk_ = v.find(kUnkToken).value_or(0);
    return v;
}

void Vocabulary::extend(const std::vector<std::vector<std::string>>& sequences, std::size_t min_count,
                        std::size_t max_size) {
    std::map<std::string, std::size_t> counts;
    for (const auto& seq : sequences)
        for (const auto& t : seq) ++counts[t];
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [tok, n] : ranked) {
        if (n < min_count) continue;
        if (max_size && size() >= max_size) break;
        add(tok);
    }
}

std::size_t Vocabulary::add(const std::string& token) {
    auto [it, inserted] = index_.emplace(token, tokens_.size());
    if (inserted) tokens_.push_back(token);
    return it->second;
}

std::optional<std::size_t> Vocabulary::find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Vocabulary::index(const std::string& token) const { return find(token).value_or(unk_); }

const std::string& Vocabulary::token(std::size_t index) const {
    if (index >= tokens_.size())
        throw ContractViolation("token id " + std::to_string(index) + " outside vocabulary of size " +
                                std::to_string(tokens_.size()));
    return tokens_[index];
}

std::string Vocabulary::fingerprint() const {
    std::uint64_t h = fnv1a64("");
    for (const auto& t : tokens_) {
        h = fnv1a64(t, h);
        h = fnv1a64("\n", h);
    }
    return hex64(h);
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write vocabulary " + path.string());
    for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vocabulary " + path.string());
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) tokens.push_back(line);
    return from_tokens(std::move(tokens));
}

}  // namespace g2t
