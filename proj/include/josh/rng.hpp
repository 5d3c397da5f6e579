#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace josh {

// Deterministic random stream. std::mt19937_64 is a portable engine; the
// transforms below avoid the unspecified std::*_distribution algorithms so
// that the same seed reproduces the same stream on any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), n > 0
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    // standard normal, Box-Muller with a cached spare
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace josh
