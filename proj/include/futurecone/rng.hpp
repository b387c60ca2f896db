#pragma once

#include "futurecone/geometry.hpp"

#include <cstdint>

namespace futurecone {

/// splitmix64 — fixed-width generator so seeded runs reproduce byte-for-byte
/// on any platform (std:: distributions make no such promise).
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + uniform01() * (b - a); }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }

    /// Uniform direction on the unit circle (d=2) or sphere (d=3).
    Vec unit_vector(int dim) {
        if (dim == 2) {
            double a = uniform(0.0, 6.283185307179586476925287);
            return Vec(std::cos(a), std::sin(a));
        }
        double z = uniform(-1.0, 1.0);
        double phi = uniform(0.0, 6.283185307179586476925287);
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return Vec(r * std::cos(phi), r * std::sin(phi), z);
    }

private:
    uint64_t state_;
};

/// Stable per-trial seed derivation: hash of (master, index).
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    SplitMix64 g(master ^ (0xA0761D6478BD642Full * (index + 1)));
    return g.next();
}

} // namespace futurecone
