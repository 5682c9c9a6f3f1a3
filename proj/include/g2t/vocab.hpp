#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace g2t {

/// Bijective token <-> index map. Reserved tokens occupy the first indices.
class Vocabulary {
  public:
    static constexpr std::size_t kPad = 0;
    static constexpr std::size_t kBos = 1;
    static constexpr std::size_t kEos = 2;
    static constexpr std::size_t kUnk = 3;

    /// Token vocabulary: <pad> <s> </s> <unk>.
    static Vocabulary tokens();
    /// Edge-label vocabulary: <unk> self.
    static Vocabulary labels();

    /// Adds tokens seen at least `min_count` times, most frequent first (ties
    /// broken lexicographically). `max_size` = 0 means unlimited.
    void extend(const std::vector<std::vector<std::string>>& sequences, std::size_t min_count = 1,
                std::size_t max_size = 0);

    std::size_t add(const std::string& token);
    std::optional<std::size_t> find(const std::string& token) const;
    bool contains(const std::string& token) const { return find(token).has_value(); }
    /// Index of `token`, or the unknown-token index.
    std::size_t index(const std::string& token) const;
    const std::string& token(std::size_t index) const;
    std::size_t unk_index() const { return unk_; }
    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& all() const { return tokens_; }

    /// FNV-1a over the newline-joined token list, as 16 hex digits.
    std::string fingerprint() const;

    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path);
    static Vocabulary from_tokens(std::vector<std::string> tokens);

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t unk_ = 0;
};

std::string hex64(std::uint64_t v);

}  // namespace g2t
