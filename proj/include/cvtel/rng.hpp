#ifndef CVTEL_RNG_HPP
#define CVTEL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>

namespace cvtel {

// Seeded generator with a fixed output recipe, so records replay bit for bit
// on any standard library. mt19937_64 is bit-exact by specification; the
// normal deviate is a hand-rolled Box-Muller on top of it.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        // 53-bit mantissa uniform in [0,1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal(double mean, double stddev) {
        if (!have_spare_) {
            double u1 = uniform01();
            while (u1 <= 0.0) u1 = uniform01();
            const double u2 = uniform01();
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double a = 2.0 * std::numbers::pi * u2;
            spare_ = r * std::sin(a);
            have_spare_ = true;
            return mean + stddev * r * std::cos(a);
        }
        have_spare_ = false;
        return mean + stddev * spare_;
    }

    // Index sampled from unnormalized nonnegative weights by inverse CDF.
    std::size_t discrete(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::runtime_error("discrete: no probability mass");
        const double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace cvtel

#endif
