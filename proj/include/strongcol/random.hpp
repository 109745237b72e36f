#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace strongcol {

// Seed derivation.
//
// Every randomized entity (a graph row, a trial, a restart, a stage) draws from
// its own substream. The substream seed is
//
//     mix_seed(root, stream) = splitmix64_finalize(root ^ (golden * (stream + 1)))
//
// which depends only on (root, stream), so results do not depend on the order
// in which entities are processed or on the number of worker threads.

inline constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream) noexcept
{
    return splitmix64_finalize(root ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

inline constexpr std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) noexcept
{
    return mix_seed(mix_seed(root, a), b);
}

/// mt19937_64 plus distributions implemented here, since the standard
/// distributions are not bit-reproducible across library implementations.
class Rng
{
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound)
    {
        // Lemire's multiply-shift with rejection.
        std::uint64_t x = engine_();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = engine_();
                m = static_cast<__uint128_t>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p)
    {
        if (p <= 0.0)
            return false;
        if (p >= 1.0)
            return true;
        return uniform() < p;
    }

    template <class T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i)
            std::swap(items[i - 1], items[below(i)]);
    }

    template <class T>
    void shuffle(std::vector<T> & items)
    {
        shuffle(std::span<T>(items));
    }

    /// Number of failures before the next success of a Bernoulli(p) sequence.
    /// log_q is log(1 - p), precomputed by the caller; 0 < p < 1.
    std::uint64_t geometric_skip(double log_q)
    {
        double u = 1.0 - uniform(); // (0, 1]
        double skip = std::floor(std::log(u) / log_q);
        if (! (skip < 1.8e19))
            return ~std::uint64_t{0};
        return static_cast<std::uint64_t>(skip);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace strongcol
