#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace hems {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Seeded xoshiro256++ stream with hand-rolled distributions, so identical
// (seed, stream, call sequence) produce identical values on every platform
// and standard library. Streams are cheap to copy; fork() derives a child
// stream from the parent's identity (not its consumption state), so forks
// taken at different points of a run are still reproducible.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {
        std::uint64_t init = seed ^ (0x6A09E667F3BCC909ULL + stream * 0x9E3779B97F4A7C15ULL);
        for (auto& word : state_) word = detail::splitmix64(init);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[3] = 0x1ULL;
    }

    RandomStream fork(std::string_view label, std::uint64_t index = 0) const {
        std::uint64_t mix = detail::fnv1a64(label);
        mix ^= index + 0x9E3779B97F4A7C15ULL + (mix << 6) + (mix >> 2);
        return RandomStream(seed_, stream_ ^ mix);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [lo, hi], inclusive. Unbiased via rejection.
    int uniform_int(int lo, int hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) -
                                                              static_cast<std::int64_t>(lo)) + 1;
        std::uint64_t x, r;
        do {
            x = next_u64();
            r = x % span;
        } while (x - r > std::uint64_t(0) - span);
        return lo + static_cast<int>(r);
    }

    bool coin() { return (next_u64() >> 63) != 0; }

    // Standard normal, Box-Muller with one cached value.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace hems
