#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace insitu {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/**
 * Counter-based generator: the i-th draw of a stream is mix64(key + i * gamma).
 *
 * Streams split by name or index into independent substreams whose keys
 * depend only on the parent key, never on how many draws the parent made.
 * All output mappings (uniform doubles, bounded integers) are defined here
 * rather than via <random> distributions so sequences are identical across
 * standard library implementations.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

    Rng substream(std::string_view name) const noexcept { return from_key(mix64(key_ ^ mix64(fnv1a(name)))); }
    Rng substream(std::uint64_t index) const noexcept
    {
        return from_key(mix64(key_ + mix64(index + 0x3c6ef372fe94f82bULL)));
    }

    std::uint64_t next() noexcept { return mix64(key_ + (++counter_) * kGamma); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept
    {
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t r = next();
        while (r >= limit) {
            r = next();
        }
        return r % n;
    }

    std::size_t index(std::size_t n) noexcept { return static_cast<std::size_t>(below(n)); }
    bool bernoulli(double p) noexcept { return uniform() < p; }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static Rng from_key(std::uint64_t key) noexcept
    {
        Rng r(0);
        r.key_ = key;
        return r;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace insitu
