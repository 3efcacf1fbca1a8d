// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rofso/fft.hpp"
#include "rofso/signal.hpp"

namespace rofso {

enum class PsdWindow { Hann, Rectangular };

/// Welch PSD. Density is linear power per Hz, normalized so that the
/// integral over all bins equals the time-domain mean power. Real inputs
/// fold to a one-sided estimate over [0, fs/2]; complex inputs keep a
/// two-sided estimate over [-fs/2, fs/2).
struct PsdEstimate {
    std::vector<double> freq_hz;
    std::vector<double> density;  // power / Hz
    double resolution_hz = 0.0;
    double total_power = 0.0;  // integrated density
    bool one_sided = true;

    /// Density in dB relative to total signal power per Hz.
    double db_rel(std::size_t k) const {
        return lin_pow_to_db(density[k] / (total_power > 0.0 ? total_power : 1.0));
    }

    /// Integrate the density over [f_lo, f_hi] with fractional-bin edge
    /// weighting.
    double band_power(double f_lo, double f_hi) const {
        double acc = 0.0;
        const double half = resolution_hz / 2.0;
        for (std::size_t k = 0; k < freq_hz.size(); ++k) {
            const double b_lo = freq_hz[k] - half;
            const double b_hi = freq_hz[k] + half;
            const double w = std::min(b_hi, f_hi) - std::max(b_lo, f_lo);
            if (w > 0.0) acc += density[k] * w;
        }
        return acc;
    }
};

inline PsdEstimate welch_psd(const SampledSignal& sig, std::size_t segment_len = 4096,
                             double overlap_frac = 0.5, PsdWindow window = PsdWindow::Hann) {
    const std::size_t n = sig.size();
    if (segment_len < 8) throw InputError("welch segment too short");
    if (!detail::is_pow2(segment_len)) throw InputError("welch segment must be a power of two");
    if (n < segment_len) throw InputError("signal shorter than one welch segment");
    if (overlap_frac < 0.0 || overlap_frac >= 1.0) throw InputError("overlap must be in [0,1)");

    const double fs = sig.rate_hz();
    std::vector<double> w(segment_len, 1.0);
    if (window == PsdWindow::Hann) {
        for (std::size_t i = 0; i < segment_len; ++i) {
            w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                         static_cast<double>(segment_len)));
        }
    }
    double w2 = 0.0;
    for (double v : w) w2 += v * v;

    const std::size_t hop = std::max<std::size_t>(
        1, static_cast<std::size_t>(static_cast<double>(segment_len) * (1.0 - overlap_frac) + 0.5));
    const std::size_t n_seg = (n - segment_len) / hop + 1;

    std::vector<double> acc(segment_len, 0.0);
    std::vector<cplx> blk(segment_len);
    for (std::size_t s = 0; s < n_seg; ++s) {
        const std::size_t off = s * hop;
        if (sig.is_real()) {
            const auto& x = sig.re();
            for (std::size_t i = 0; i < segment_len; ++i) blk[i] = x[off + i] * w[i];
        } else {
            const auto& x = sig.cx();
            for (std::size_t i = 0; i < segment_len; ++i) blk[i] = x[off + i] * w[i];
        }
        fft_pow2(blk, false);
        for (std::size_t i = 0; i < segment_len; ++i) acc[i] += std::norm(blk[i]);
    }
    const double scale = 1.0 / (static_cast<double>(n_seg) * fs * w2);
    for (auto& v : acc) v *= scale;

    PsdEstimate psd;
    psd.resolution_hz = fs / static_cast<double>(segment_len);
    if (sig.is_real()) {
        psd.one_sided = true;
        const std::size_t half = segment_len / 2;
        psd.freq_hz.resize(half + 1);
        psd.density.resize(half + 1);
        for (std::size_t k = 0; k <= half; ++k) {
            psd.freq_hz[k] = static_cast<double>(k) * psd.resolution_hz;
            const bool edge = (k == 0 || k == half);
            psd.density[k] = edge ? acc[k] : acc[k] + acc[segment_len - k];
        }
    } else {
        psd.one_sided = false;
        psd.freq_hz.resize(segment_len);
        psd.density.resize(segment_len);
        const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(segment_len / 2);
        for (std::ptrdiff_t q = -half; q < half; ++q) {
            const std::size_t k = static_cast<std::size_t>(q + half);
            const std::size_t bin =
                static_cast<std::size_t>((q + static_cast<std::ptrdiff_t>(segment_len)) %
                                         static_cast<std::ptrdiff_t>(segment_len));
            psd.freq_hz[k] = static_cast<double>(q) * psd.resolution_hz;
            psd.density[k] = acc[bin];
        }
    }
    for (double d : psd.density) psd.total_power += d * psd.resolution_hz;
    return psd;
}

}  // namespace rofso
