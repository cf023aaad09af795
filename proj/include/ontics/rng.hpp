#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ontics/geometry.hpp"

namespace ontics {

// Stateless seed mixer (splitmix64), used to derive independent sub-streams
// from a base seed so that composite estimates stay reproducible.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seeded generator with explicitly coded distributions. std::* distributions
// are implementation-defined, so every draw here is spelled out to keep
// results identical for identical seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        do { u = uniform(); } while (u == 0.0);
        double v = uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 2.0 * M_PI * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform on the unit sphere: z from the inverse CDF of the area measure,
    // azimuth uniform.
    Vec3 unit_sphere() {
        double z = 1.0 - 2.0 * uniform();
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = 2.0 * M_PI * uniform();
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ontics
