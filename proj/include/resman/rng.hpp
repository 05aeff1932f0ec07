#pragma once

#include <cmath>
#include <cstdint>

namespace resman {

// Deterministic 64-bit generator (splitmix64). All randomised code in this
// project draws through this class instead of the std distributions so that
// seeded runs reproduce bit-identically across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased uniform integer in [0, n); n must be > 0
    std::size_t below(std::size_t n) {
        const std::uint64_t nn = n;
        const std::uint64_t reject = (0 - nn) % nn;  // 2^64 mod n
        std::uint64_t x = next_u64();
        while (x < reject) x = next_u64();
        return static_cast<std::size_t>(x % nn);
    }

    // index in [0, n) distinct from every entry of `taken`
    template <typename Container>
    std::size_t below_excluding(std::size_t n, const Container& taken) {
        for (;;) {
            std::size_t candidate = below(n);
            bool clash = false;
            for (std::size_t t : taken)
                if (t == candidate) { clash = true; break; }
            if (!clash) return candidate;
        }
    }

    // standard normal via Box-Muller (two fresh draws per call)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::uint64_t state_;
};

// Independent stream seed for component `stream` of a run seeded by `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    Rng r(master ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    r.next_u64();
    return r.next_u64();
}

}  // namespace resman
