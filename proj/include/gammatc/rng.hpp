#ifndef GAMMATC_RNG_HPP
#define GAMMATC_RNG_HPP

#include <cstdint>
#include <cmath>

namespace gammatc {

// Counter-based generator: every draw is a pure function of (seed, stream,
// counter), so ensembles are reproducible bit-for-bit regardless of
// evaluation order and individual streams can be replayed in isolation.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : base_(mix(mix(seed ^ 0x9e3779b97f4a7c15ull) ^ stream)), counter_(0) {}

    // Uniform in [0,1).  53-bit mantissa from one mixed word.
    double uniform() {
        const std::uint64_t z = next();
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; draws two uniforms per call pair
    // and caches the second deviate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // keep log argument away from zero
        while (u1 <= 0x1.0p-60) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, n), n > 0.  Rejection-free modulo is fine here:
    // n is always tiny compared with 2^64, bias < 2^-50.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    std::uint64_t next() { return mix(base_ + 0x9e3779b97f4a7c15ull * (++counter_)); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t base_;
    std::uint64_t counter_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace gammatc

#endif
