// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rofso/signal.hpp"

namespace rofso {

// splitmix64, used to derive independent per-stage seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0xa0761d6478bd642fULL + stream * 0x9e3779b97f4a7c15ULL);
    return splitmix64(s);
}

/// Deterministic Gaussian source. std::normal_distribution is
/// implementation-defined, so Box-Muller over mt19937_64 keeps frozen test
/// values stable across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // (0, 1]
        const std::uint64_t u = engine_();
        return (static_cast<double>(u >> 11) + 1.0) * 0x1.0p-53;
    }

    std::uint64_t bits() { return engine_(); }

    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    cplx gauss_cplx() {  // unit total variance (0.5 per component)
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));
        return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rofso
