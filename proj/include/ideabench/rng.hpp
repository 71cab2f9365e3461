#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace ideabench {

// splitmix64 finalizer. Used both as a stream generator and as the mixing
// step for counter-based (stateless) randomness, so results are identical
// across platforms and thread schedules.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_mix(std::uint64_t seed, std::uint64_t v) {
    return splitmix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t hash_str(std::uint64_t seed, const std::string& s) {
    std::uint64_t h = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    for (unsigned char c : s) h = splitmix64(h ^ c);
    return h;
}

// Derive a child key from a seed and a list of integer coordinates.
inline std::uint64_t hash_key(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t c : coords) h = hash_mix(h, c);
    return h;
}

// Map a 64-bit word to a double in [0, 1). 53 mantissa bits.
inline double to_unit_real(std::uint64_t x) {
    return static_cast<double>(x >> 11) * (1.0 / 9007199254740992.0);
}

// Counter-based uniform draw: pure function of (seed, coords).
inline double unit_real_at(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
    return to_unit_real(hash_key(seed, coords));
}

// Small deterministic stream RNG. Not std::mt19937 + distributions because
// distribution output is implementation-defined; bit-identical replay across
// platforms is part of the determinism contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x2545f4914f6cdd1dULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64(state_);
    }

    // Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    double unit_real() { return to_unit_real(next_u64()); }

    // Split off an independent child stream; parent state advances once.
    Rng split(std::uint64_t tag) { return Rng(hash_mix(next_u64(), tag)); }

private:
    std::uint64_t state_;
};

// k distinct indices from [0, n), order given by successive draws.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k);

// k indices from [0, n), drawn independently.
std::vector<std::size_t> sample_with_replacement(Rng& rng, std::size_t n, std::size_t k);

}  // namespace ideabench
