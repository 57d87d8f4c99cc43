/// @file rng.hpp
/// @brief Counter-based deterministic random streams.
///
/// Every random draw in the project is a pure function of (seed, stream
/// labels), so resumed runs and re-runs reproduce draws exactly without
/// carrying generator state through checkpoints.

#pragma once

#include <cstdint>
#include <complex>

namespace hcf {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stateless stream: hash of a seed and up to three labels (e.g. step,
/// grid point, restart index). Successive values come from next().
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0)
        : state_(splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b) ^ c)) {}

    std::uint64_t next_u64() {
        state_ = splitmix64(state_);
        return state_;
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    int next_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Standard complex Gaussian (Box-Muller), for isotropic directions.
    std::complex<double> next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 1e-300) u1 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(6.283185307179586476925287 * u2),
                r * std::sin(6.283185307179586476925287 * u2)};
    }

private:
    std::uint64_t state_;
};

}  // namespace hcf
