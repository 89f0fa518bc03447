#pragma once
#include <cstdint>
#include <vector>

// Deterministic randomness for every stochastic component.
//
// Everything is built on the SplitMix64 output function: a stream is a pure
// function of (seed, counter), so simulation i of a run can be regenerated
// in isolation and parallel execution cannot change results. This generator
// choice is part of the golden-file contract; changing it invalidates
// recorded outputs.

namespace critk::rng {

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Uniform double in [0,1) from 53 high bits.
inline double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Uniform double in the open interval (0,1): cell midpoints, so neither
// endpoint is reachable. Used for linear-threshold node thresholds. 52 bits,
// not 53: the top midpoint (2^53 - 0.5) would round to 2^53 and leak a 1.0.
inline double to_unit_open(std::uint64_t x) {
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

// Stream tags keep unrelated uses of the same user seed decorrelated.
inline constexpr std::uint64_t kTagSim = 0x73696d756c617465ULL;
inline constexpr std::uint64_t kTagPerm = 0x7065726d75746174ULL;
inline constexpr std::uint64_t kTagBanzhaf = 0x62616e7a68616620ULL;
inline constexpr std::uint64_t kTagEval = 0x6576616c75617465ULL;
inline constexpr std::uint64_t kTagCoalition = 0x636f616c6974696fULL;
inline constexpr std::uint64_t kTagTie = 0x7469656272656164ULL;
inline constexpr std::uint64_t kTagStep = 0x7374657073656564ULL;

// Derives the seed of sub-stream i of (seed, tag).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t i) {
    return mix64(mix64(seed ^ tag) + kGamma * (i + 1));
}

// The k-th uniform variate of a stream, addressable by counter.
inline double unit_at(std::uint64_t stream, std::uint64_t counter) {
    return to_unit(mix64(stream + kGamma * counter));
}

// Open-interval variant, for draws that must avoid 0 and 1 exactly.
inline double unit_open_at(std::uint64_t stream, std::uint64_t counter) {
    return to_unit_open(mix64(stream + kGamma * counter));
}

// Sequential generator for shuffles and tie-breaking.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGamma;
        return mix64(state_);
    }

    double next_unit() { return to_unit(next()); }

    // Unbiased integer in [0, bound) via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

  private:
    std::uint64_t state_;
};

// Fisher-Yates shuffle driven by an explicit generator, so the permutation
// sequence is identical on every platform (std::shuffle is not portable).
template <typename T>
void shuffle(T* data, std::size_t n, SplitMix64& gen) {
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(gen.next_below(i));
        std::swap(data[i - 1], data[j]);
    }
}

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& gen) {
    shuffle(v.data(), v.size(), gen);
}

}  // namespace critk::rng
