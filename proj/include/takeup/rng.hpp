#pragma once

#include <cstdint>
#include <random>

#include "takeup/mathx.hpp"

namespace takeup {

// Deterministic random stream. mt19937_64 output is fixed by the standard;
// the transforms below avoid std:: distributions (whose algorithms are
// implementation-defined) so that identical seeds give identical draws on
// any conforming toolchain.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Derive an independent stream from (seed, stream ids) via splitmix64.
    static Rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t x = seed;
        x = mix(x ^ mix(a + 0x9e3779b97f4a7c15ULL));
        x = mix(x ^ mix(b + 0xbf58476d1ce4e5b9ULL));
        return Rng(x);
    }

    std::uint64_t bits() { return engine_(); }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1), safe for quantile transforms.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal(double mean = 0.0, double sd = 1.0) {
        return mean + sd * normal_quantile(uniform_open());
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Draw an index according to non-negative weights.
    template <typename Container>
    std::size_t categorical(const Container& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        std::size_t i = 0;
        for (double w : weights) {
            if ((u -= w) < 0.0) return i;
            ++i;
        }
        return weights.size() - 1;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

// FNV-1a 64-bit, used for option hashes in run manifests.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace takeup
