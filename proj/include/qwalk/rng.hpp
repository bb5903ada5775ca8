#pragma once

#include <cmath>
#include <cstdint>

#include "qwalk/common.hpp"

namespace qwalk {

// Deterministic splittable uniform stream built on the splitmix64 mixer
// (Steele, Lea, Flood: "Fast splittable pseudorandom number generators").
// The same seed yields a bit-identical sequence on every platform, which is
// what makes flux CSVs reproducible byte for byte. split() derives a child
// stream decorrelated from the parent sequence.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed), seed_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; the endpoint convention inverse-CDF flight sampling needs.
    double next_open_closed() { return 1.0 - next_double(); }

    // Standard normal via Box-Muller, pairs cached.
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_open_closed();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * kPi * u2);
        have_cached_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    RngStream split() {
        ++split_count_;
        // Extra mix round so the child sequence does not overlap the parent's.
        std::uint64_t child = next_u64() ^ 0xD1B54A32D192ED03ULL;
        return RngStream(child);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t split_count() const { return split_count_; }

private:
    std::uint64_t state_;
    std::uint64_t seed_;
    std::uint64_t split_count_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace qwalk
