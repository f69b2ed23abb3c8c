#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace wavecast {

/// splitmix64 finaliser; used to derive independent per-trial seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t index) {
    return mix_seed(run_seed ^ mix_seed(index + 1));
}

/// mt19937_64 with distribution code written out here, so draws do not depend
/// on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), rejection sampled.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    std::string state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    bool set_state(const std::string& s) {
        std::istringstream is(s);
        std::mt19937_64 restored;
        is >> restored;
        if (is.fail()) {
            return false;
        }
        engine_ = restored;
        return true;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace wavecast
