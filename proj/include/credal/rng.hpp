#pragma once

#include "credal/definitions.hpp"

#include <cstdint>
#include <random>

namespace credal {

/// Name recorded in reports for the generator + draw scheme below.
inline constexpr const char* rng_name = "mt19937_64/shift53";

/// splitmix64 step; used to derive independent per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seedable portable random source. mt19937_64 output is fully specified
/// by the standard; doubles are drawn by the 53-bit shift-scale rule, so
/// streams are reproducible across platforms for a fixed seed.
class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        assert(n > 0);
        // rejection keeps the draw unbiased and seed-portable
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return std::size_t(x % n);
    }

    /// Uniform point on the probability simplex of size n
    /// (exponential-normalization construction).
    numvec simplex(std::size_t n) {
        numvec p(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; i++) {
            // -log(1-u) is finite since u < 1
            p[i] = -std::log(1.0 - uniform());
            total += p[i];
        }
        if (total <= 0.0) {
            // all draws hit zero; fall back to the barycenter
            for (double& v : p)
                v = 1.0 / double(n);
            return p;
        }
        for (double& v : p)
            v /= total;
        return p;
    }

    /// Random direction of unit Euclidean norm.
    numvec direction(std::size_t dim) {
        numvec p(dim);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (std::size_t i = 0; i < dim; i++) {
                p[i] = uniform(-1.0, 1.0);
                norm2 += p[i] * p[i];
            }
        } while (norm2 < 1e-12);
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : p)
            v *= inv;
        return p;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace credal
