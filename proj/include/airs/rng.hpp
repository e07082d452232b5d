// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace airs {

// SplitMix64 generator. We roll our own instead of using <random> engines so
// that streams are bit-identical across standard libraries and platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in (0, 1]: never returns 0, so log() below is safe.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Circularly symmetric complex Gaussian CN(0, 1): one Box-Muller pair per
    // sample, consuming exactly two uniforms.
    std::complex<double> next_cgauss() {
        const double r = std::sqrt(-std::log(next_uniform()));
        const double th = 2.0 * M_PI * next_uniform();
        return {r * std::cos(th), r * std::sin(th)};
    }

  private:
    std::uint64_t state_;
};

// Fixed splitting rule for deriving independent child streams, e.g. one per
// (sweep value, drop). Stafford mix of the hashed tuple.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = root ^ (0x9e3779b97f4a7c15ULL * (a + 1)) ^ (0xc2b2ae3d27d4eb4fULL * (b + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace airs
