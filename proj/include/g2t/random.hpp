#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace g2t {

/// splitmix64 finaliser; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Seeded generator with portable helpers. The standard distributions are
/// implementation-defined, so everything here is built on raw mt19937_64 output.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

    /// Child stream keyed by name, e.g. Rng(seed).stream("dropout").
    Rng stream(std::string_view name) const;
    Rng stream(std::uint64_t key) const;

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform in [0, n), unbiased.
    std::size_t index(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace g2t
