#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tjflow {

/// splitmix64 mixing step; used to derive independent stream seeds from a
/// base seed so that parallel workers (trees, runs) get decorrelated RNGs
/// whose output does not depend on scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// mt19937_64 engine with hand-rolled distributions. The standard library
/// distributions are implementation-defined, which would break the
/// byte-identical reproducibility contract across platforms; the engine
/// itself is fully specified.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Modulo bias is below 2^-53 for any n
    /// reachable here.
    std::uint64_t uniform_index(std::uint64_t n) { return eng_() % n; }

    /// Marsaglia polar method, one cached value.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Rejection-sampled truncated normal; [lo, hi] must have nonzero mass.
    double truncated_normal(double mean, double stddev, double lo, double hi) {
        for (;;) {
            const double x = normal(mean, stddev);
            if (x >= lo && x <= hi) return x;
        }
    }

    /// Fisher-Yates; not std::shuffle, whose draw pattern is unspecified.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace tjflow
