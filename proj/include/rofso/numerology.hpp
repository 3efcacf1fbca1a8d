// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rofso/errors.hpp"
#include "rofso/fft.hpp"

namespace rofso {

/// OFDM numerology: subcarrier spacing, grid size, CP schedule. The CP
/// schedule covers one 1 ms subframe; it repeats every subframe.
struct Numerology {
    double scs_hz = 0.0;
    std::size_t n_rb = 0;
    std::size_t fft_size = 0;
    double sample_rate_hz = 0.0;
    std::vector<std::size_t> cp_lengths;  // one entry per OFDM symbol in a subframe
    std::size_t symbols_per_slot = 14;
    std::size_t slots_per_frame = 0;

    std::size_t mu = 0;  // scs = 15 kHz * 2^mu

    std::size_t n_subcarriers() const { return 12 * n_rb; }
    double occupied_bw_hz() const { return static_cast<double>(n_subcarriers()) * scs_hz; }
    std::size_t slots_per_subframe() const { return std::size_t{1} << mu; }
    std::size_t symbols_per_subframe() const { return symbols_per_slot * slots_per_subframe(); }
    std::size_t samples_per_subframe() const {
        std::size_t total = 0;
        for (std::size_t cp : cp_lengths) total += cp + fft_size;
        return total;
    }
};

struct CarrierConfig {
    double carrier_hz = 0.0;
    double passband_rate_hz = 0.0;
    double occupied_bw_hz = 0.0;

    void validate() const {
        if (carrier_hz <= 0.0 || passband_rate_hz <= 0.0)
            throw ConfigError("carrier and passband rate must be positive");
        if (passband_rate_hz <= 2.0 * (carrier_hz + occupied_bw_hz / 2.0))
            throw ConfigError("passband rate violates Nyquist for the carrier");
    }
};

namespace detail {

// NR FR1 transmission bandwidth configuration N_RB, indexed by
// (SCS kHz, channel bandwidth MHz).
inline std::size_t fr1_n_rb(unsigned scs_khz, unsigned bw_mhz) {
    struct Entry {
        unsigned scs, bw;
        std::size_t n_rb;
    };
    static constexpr Entry table[] = {
        {15, 5, 25},   {15, 10, 52},  {15, 15, 79},  {15, 20, 106}, {15, 25, 133},
        {15, 30, 160}, {15, 40, 216}, {15, 50, 270},

        {30, 5, 11},   {30, 10, 24},  {30, 15, 38},  {30, 20, 51},  {30, 25, 65},
        {30, 30, 78},  {30, 40, 106}, {30, 50, 133}, {30, 60, 162}, {30, 80, 217},
        {30, 90, 245}, {30, 100, 273},

        {60, 10, 11},  {60, 15, 18},  {60, 20, 24},  {60, 25, 31},  {60, 30, 38},
        {60, 40, 51},  {60, 50, 65},  {60, 60, 79},  {60, 80, 107}, {60, 90, 121},
        {60, 100, 135},
    };
    for (const auto& e : table) {
        if (e.scs == scs_khz && e.bw == bw_mhz) return e.n_rb;
    }
    throw ConfigError("unsupported (scs, bandwidth) pair: " + std::to_string(scs_khz) + " kHz / " +
                      std::to_string(bw_mhz) + " MHz");
}

}  // namespace detail

/// Build the numerology for a supported FR1 (scs, channel bandwidth) pair.
/// FFT size is the smallest power of two holding all occupied subcarriers
/// (times an optional guard margin); the normal-CP schedule is evaluated at
/// the resulting sample rate.
inline Numerology make_numerology(double scs_hz, double bandwidth_hz, double guard_margin = 0.0) {
    const unsigned scs_khz = static_cast<unsigned>(scs_hz / 1e3 + 0.5);
    const unsigned bw_mhz = static_cast<unsigned>(bandwidth_hz / 1e6 + 0.5);
    if (scs_khz != 15 && scs_khz != 30 && scs_khz != 60)
        throw ConfigError("unsupported subcarrier spacing");

    Numerology num;
    num.scs_hz = static_cast<double>(scs_khz) * 1e3;
    num.mu = (scs_khz == 15) ? 0 : (scs_khz == 30) ? 1 : 2;
    num.n_rb = detail::fr1_n_rb(scs_khz, bw_mhz);
    num.fft_size = next_pow2(static_cast<std::size_t>(
        std::ceil(static_cast<double>(12 * num.n_rb) * (1.0 + guard_margin))));
    num.sample_rate_hz = static_cast<double>(num.fft_size) * num.scs_hz;
    num.slots_per_frame = 10 * num.slots_per_subframe();

    // Normal CP at sample rate fft*scs: 144*fft/2048 samples per symbol, with
    // 16*fft*2^mu/2048 extra on the first symbol of each half-subframe.
    if ((144 * num.fft_size) % 2048 != 0 || ((num.fft_size << num.mu) % 128) != 0)
        throw ConfigError("fft size too small for an integer CP schedule");
    const std::size_t cp_base = 144 * num.fft_size / 2048;
    const std::size_t cp_extra = (num.fft_size << num.mu) / 128;
    const std::size_t n_sym = num.symbols_per_subframe();
    num.cp_lengths.assign(n_sym, cp_base);
    num.cp_lengths[0] += cp_extra;
    num.cp_lengths[n_sym / 2] += cp_extra;
    return num;
}

/// The bench default: 20 MHz / 30 kHz SCS carrier at 627 MHz, simulated at
/// 80x the baseband rate.
inline CarrierConfig default_carrier(const Numerology& num, double carrier_hz = 627e6,
                                     double passband_rate_hz = 2.4576e9) {
    CarrierConfig c;
    c.carrier_hz = carrier_hz;
    c.passband_rate_hz = passband_rate_hz;
    c.occupied_bw_hz = num.occupied_bw_hz();
    c.validate();
    return c;
}

}  // namespace rofso
