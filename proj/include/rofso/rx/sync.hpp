// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "rofso/fft.hpp"
#include "rofso/numerology.hpp"
#include "rofso/rx/demod.hpp"
#include "rofso/signal.hpp"

namespace rofso {

struct SyncConfig {
    double corr_threshold = 0.10;  // normalized |xcorr|^2 acceptance level
    std::size_t cfo_symbols = 28;  // symbols averaged for the CP CFO estimate
};

namespace detail {

// cross-correlation c[d] = sum_t conj(tpl[t]) x[d+t] for all d, FFT-based
inline std::vector<cplx> xcorr_fft(const std::vector<cplx>& x, const std::vector<cplx>& tpl) {
    const std::size_t n_out = x.size() >= tpl.size() ? x.size() - tpl.size() + 1 : 0;
    if (n_out == 0) return {};
    const std::size_t nfft = next_pow2(x.size() + tpl.size());
    std::vector<cplx> fx(nfft, cplx{0.0, 0.0}), ft(nfft, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < x.size(); ++i) fx[i] = x[i];
    for (std::size_t i = 0; i < tpl.size(); ++i) ft[i] = std::conj(tpl[i]);
    fft_pow2(fx, false);
    fft_pow2(ft, false);
    for (std::size_t i = 0; i < nfft; ++i) fx[i] *= ft[i];
    fft_pow2(fx, true);
    const double s = 1.0 / static_cast<double>(nfft);
    std::vector<cplx> c(n_out);
    for (std::size_t d = 0; d < n_out; ++d) c[d] = fx[d] * s;
    return c;
}

}  // namespace detail

/// Frame timing from cross-correlation with the known first-slot DMRS
/// symbol waveform, plus a CP-autocorrelation CFO estimate (valid within
/// +/- scs/2). `dmrs_offset` is the template's sample offset from the frame
/// start.
inline SyncResult time_synchronize(const SampledSignal& bb, const Numerology& num,
                                   const std::vector<cplx>& dmrs_template,
                                   std::size_t dmrs_offset, const SyncConfig& cfg = {}) {
    if (bb.is_real()) throw InputError("time_synchronize expects complex baseband");
    const auto& x = bb.cx();
    const std::size_t min_len = ofdm_waveform_length(num, num.symbols_per_slot);
    if (x.size() < min_len) throw SyncError("signal shorter than one slot");
    if (dmrs_template.empty()) throw SyncError("empty sync template");

    const auto c = detail::xcorr_fft(x, dmrs_template);
    if (c.empty()) throw SyncError("signal shorter than the sync template");

    // sliding signal energy for normalization
    std::vector<double> prefix(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + std::norm(x[i]);
    double e_tpl = 0.0;
    for (const cplx& v : dmrs_template) e_tpl += std::norm(v);

    std::vector<double> metric(c.size(), 0.0);
    double best = 0.0;
    for (std::size_t d = 0; d < c.size(); ++d) {
        const double e_win = prefix[d + dmrs_template.size()] - prefix[d];
        if (e_win <= 0.0 || e_tpl <= 0.0) continue;
        metric[d] = std::norm(c[d]) / (e_win * e_tpl);
        best = std::max(best, metric[d]);
    }
    if (best < cfg.corr_threshold) throw SyncError("correlation peak below threshold");

    // first peak comparable to the global best = earliest frame boundary
    std::size_t peak = 0;
    for (std::size_t d = 0; d < metric.size(); ++d) {
        if (metric[d] >= 0.9 * best) {
            peak = d;
            break;
        }
    }
    // refine to the local maximum around the first-crossing point
    const std::size_t lo = peak > 8 ? peak - 8 : 0;
    const std::size_t hi = std::min(peak + 8, metric.size() - 1);
    for (std::size_t d = lo; d <= hi; ++d) {
        if (metric[d] > metric[peak]) peak = d;
    }

    SyncResult res;
    res.peak_metric = metric[peak];
    if (peak < dmrs_offset) throw SyncError("frame start precedes the capture");
    res.start_index = peak - dmrs_offset;

    // parabolic interpolation for the fractional residual
    if (peak > 0 && peak + 1 < metric.size()) {
        const double a = metric[peak - 1], b = metric[peak], cc = metric[peak + 1];
        const double den = a - 2.0 * b + cc;
        if (std::abs(den) > 1e-30) res.frac_offset = 0.5 * (a - cc) / den;
    }

    // CP autocorrelation CFO estimate over the first cfo_symbols symbols
    cplx acc{0.0, 0.0};
    std::size_t pos = res.start_index;
    const std::size_t nfft = num.fft_size;
    for (std::size_t sym = 0; sym < cfg.cfo_symbols; ++sym) {
        const std::size_t cp = cp_of_symbol(num, sym);
        if (pos + cp + nfft > x.size()) break;
        for (std::size_t i = 0; i < cp; ++i) acc += x[pos + i] * std::conj(x[pos + i + nfft]);
        pos += cp + nfft;
    }
    if (std::abs(acc) > 0.0) {
        // cp * conj(body) rotates by -2*pi*cfo*nfft/fs
        res.cfo_hz = -std::arg(acc) * bb.rate_hz() / (2.0 * kPi * static_cast<double>(nfft));
    }
    return res;
}

}  // namespace rofso
