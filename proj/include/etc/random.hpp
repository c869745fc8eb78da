#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace etc {

// mt19937_64 is fully specified by the standard; the distributions in <random>
// are not, so the few we need are derived from raw bits here to keep paths
// identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(seed, stream)) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

// Independent streams drawn from one scenario seed.
enum class Stream : std::uint64_t { switching = 1, attack = 2, initial = 3 };

inline Rng make_rng(std::uint64_t seed, Stream s) {
    return Rng(seed, static_cast<std::uint64_t>(s));
}

}  // namespace etc
