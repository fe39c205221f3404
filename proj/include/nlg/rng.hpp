// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace nlg {

// Splittable counter-based generator. Every stream is a pure function of
// (seed, counter), so derived streams are independent of evaluation order
// and results are reproducible across platforms. Core mixer is SplitMix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        counter_++;
        return mix(state_ + 0x632be59bd9b4e019ULL * counter_);
    }

    // Child stream keyed by a tag; does not disturb this stream's counter.
    Rng split(std::uint64_t tag) const {
        return Rng(mix(state_ ^ mix(tag + 0x9e3779b97f4a7c15ULL)));
    }
    Rng split(std::string_view tag) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : tag) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return split(h);
    }

    // Uniform in [0,1) with 53 bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; avoids platform-dependent std::normal_distribution.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        while (u1 <= 1e-300) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    bool bit() { return (next_u64() & 1ULL) != 0; }

  private:
    std::uint64_t state_ = 0;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace nlg
