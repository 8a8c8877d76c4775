#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace funcnn {

// Deterministic random source used by every stochastic operation in the
// library. The generator is std::mt19937_64 (bit-exact across platforms by
// the standard); uniforms take the top 53 bits of one engine draw, normals
// use the Marsaglia polar method with a cached spare. Draw sequences are
// therefore stable across runs for a fixed seed.
//
// split(label) derives an independent stream from (construction seed, label)
// via FNV-1a + splitmix64 mixing; it does not depend on how many draws have
// been made, so concurrent consumers can derive their streams up front.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Uniform on [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal draw.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

    Rng split(std::string_view label) const {
        std::uint64_t h = 1469598103934665603ull;
        for (const char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return Rng(splitmix64(seed_ ^ h));
    }

    Rng split(std::uint64_t salt) const {
        return Rng(splitmix64(seed_ ^ (salt * 0x9E3779B97F4A7C15ull)));
    }

private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace funcnn
