// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rofso/errors.hpp"
#include "rofso/signal.hpp"

namespace rofso {

/// PRBS-23 (x^23 + x^18 + 1), Fibonacci form. The 23-bit seed is the initial
/// register state and is recorded in every config and report.
class Prbs23 {
  public:
    explicit Prbs23(std::uint32_t seed) : state_(seed & 0x7fffffu) {
        if (state_ == 0) state_ = 0x1;  // all-zero state is degenerate
    }

    int next_bit() {
        const std::uint32_t b = ((state_ >> 22) ^ (state_ >> 17)) & 1u;
        state_ = ((state_ << 1) | b) & 0x7fffffu;
        return static_cast<int>(b);
    }

    std::vector<std::uint8_t> bits(std::size_t n) {
        std::vector<std::uint8_t> out(n);
        for (auto& b : out) b = static_cast<std::uint8_t>(next_bit());
        return out;
    }

  private:
    std::uint32_t state_;
};

inline unsigned qam_bits_per_symbol(unsigned order) {
    switch (order) {
        case 4: return 2;
        case 64: return 6;
        case 256: return 8;
        default: throw InputError("unsupported QAM order");
    }
}

/// Map one symbol's bits (b0 b1 ... in NR order) to a constellation point.
inline cplx qam_point(const std::uint8_t* bits, unsigned order) {
    auto s = [&](unsigned k) { return 1 - 2 * static_cast<int>(bits[k] & 1); };
    switch (order) {
        case 4:
            return {s(0) / std::sqrt(2.0), s(1) / std::sqrt(2.0)};
        case 64:
            return {s(0) * (4 - s(2) * (2 - s(4))) / std::sqrt(42.0),
                    s(1) * (4 - s(3) * (2 - s(5))) / std::sqrt(42.0)};
        case 256:
            return {s(0) * (8 - s(2) * (4 - s(4) * (2 - s(6)))) / std::sqrt(170.0),
                    s(1) * (8 - s(3) * (4 - s(5) * (2 - s(7)))) / std::sqrt(170.0)};
        default:
            throw InputError("unsupported QAM order");
    }
}

/// Gray-mapped square QAM per the NR modulation mapper, normalized to unit
/// mean constellation power. Supported orders: 4 (QPSK), 64, 256.
inline std::vector<cplx> qam_modulate(const std::vector<std::uint8_t>& bits, unsigned order) {
    const unsigned bps = qam_bits_per_symbol(order);
    if (bits.size() % bps != 0) throw InputError("bit count not divisible by bits-per-symbol");
    std::vector<cplx> out;
    out.reserve(bits.size() / bps);
    for (std::size_t i = 0; i < bits.size(); i += bps) out.push_back(qam_point(&bits[i], order));
    return out;
}

/// Seeded QPSK reference sequence for DMRS.
inline std::vector<cplx> qpsk_sequence(std::size_t n, std::uint32_t seed) {
    Prbs23 prbs(seed);
    return qam_modulate(prbs.bits(2 * n), 4);
}

}  // namespace rofso
