#pragma once

#include <cmath>
#include <cstdint>

namespace sfpkit {

// Counter-based random streams. Every consumer of randomness derives its own
// stream key from (root seed, purpose tag, object id), so results do not
// depend on evaluation order or thread schedule, and a stream can be resumed
// at any point by restoring its counter.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Stream purposes. Keeping points / weights / edges separate makes it
// possible to resample one ingredient while holding the others fixed.
enum class StreamTag : std::uint64_t {
    points = 1,
    weights = 2,
    edges = 3,
    recovery = 4,
    arrows = 5,
    replica = 6,
    pairs = 7,
};

inline constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a,
                                          std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t k = mix64(seed ^ 0x706172616d736b65ull);
    k = mix64(k ^ a);
    k = mix64(k ^ b);
    k = mix64(k ^ c);
    return k;
}

inline constexpr std::uint64_t derive_key(std::uint64_t seed, StreamTag tag,
                                          std::uint64_t b = 0, std::uint64_t c = 0) {
    return derive_key(seed, static_cast<std::uint64_t>(tag), b, c);
}

// Seed for replica r of a run rooted at `seed`. Documented splitting rule:
// replica seeds are derive_key(seed, StreamTag::replica, r).
inline constexpr std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t r) {
    return derive_key(seed, StreamTag::replica, r);
}

class Stream {
public:
    using result_type = std::uint64_t;

    Stream() = default;
    explicit Stream(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), ctr_(counter) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    result_type operator()() { return mix64(key_ + kGolden * ++ctr_); }

    std::uint64_t counter() const { return ctr_; }
    void set_counter(std::uint64_t c) { ctr_ = c; }

    // Uniform on the open interval (0,1); never returns an endpoint.
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Exponential with the given rate.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Integer uniform on [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // Exact Poisson sampling: Knuth's product method, with the mean split
    // into bounded chunks (Poisson additivity) so the products never
    // underflow.
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 32.0) {
            total += poisson_small(32.0);
            mean -= 32.0;
        }
        return total + poisson_small(mean);
    }

private:
    std::uint64_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
};

}  // namespace sfpkit
