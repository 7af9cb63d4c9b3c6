#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "agingmimo/types.hpp"

namespace agingmimo {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

// Deterministic, platform-independent generator (xoshiro256** seeded through
// SplitMix64).  All randomness in the library flows through this type so that
// a run is reproducible bit-for-bit from a single master seed; the standard
// library distributions are avoided on purpose because their output is
// implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& s : s_) s = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (explicit formulas, not std::normal_distribution).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // uniform() can return 0; shift into (0, 1] for the log.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * pi * u2);
    }

    /// Circularly symmetric complex normal with variance `var` (per complex sample).
    cxd cgaussian(double var = 1.0) {
        const double s = std::sqrt(0.5 * var);
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {s * r * std::cos(2.0 * pi * u2), s * r * std::sin(2.0 * pi * u2)};
    }

    /// Vector of i.i.d. CN(0, var) entries.
    VecC cgaussian_vec(int n, double var = 1.0) {
        VecC v(n);
        for (int i = 0; i < n; ++i) v(i) = cgaussian(var);
        return v;
    }

  private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Counter-based stream derivation: seed_i = mix(master, tag, index).  Streams
/// derived with distinct (tag, index) pairs are statistically independent, and
/// the mapping is a pure function, so per-trial streams do not depend on thread
/// scheduling or evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index) {
    // FNV-1a over the tag, then two SplitMix64 rounds to mix in master and index.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t state = master ^ h;
    std::uint64_t a = detail::splitmix64(state);
    state = a ^ (index + 0x9e3779b97f4a7c15ULL * (index + 1));
    return detail::splitmix64(state);
}

}  // namespace agingmimo
