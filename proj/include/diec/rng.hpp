#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace diec {

/// Seeded random source with platform-independent draws.
///
/// std::mt19937_64 is bit-exact across standard libraries but the
/// <random> distributions are not, so every draw is derived from raw
/// engine output here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller (one value per call).
    double normal();

    bool bernoulli(double p) { return uniform() < p; }

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// 64-bit FNV-1a over the bytes of `text`, finalized with a splitmix64
/// mix of `seed`.
std::uint64_t hash_string(std::string_view text, std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace diec
