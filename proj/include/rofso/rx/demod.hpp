// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "rofso/fft.hpp"
#include "rofso/numerology.hpp"
#include "rofso/ofdm.hpp"
#include "rofso/signal.hpp"
#include "rofso/test_model.hpp"

namespace rofso {

/// Timing/frequency estimate feeding CP removal.
struct SyncResult {
    std::size_t start_index = 0;    // first sample of the first symbol's CP
    double frac_offset = 0.0;       // residual fractional timing, samples
    double cfo_hz = 0.0;            // CP-autocorrelation CFO estimate
    double peak_metric = 0.0;       // normalized DMRS correlation at the peak
};

/// Strip CPs and forward-FFT (unitary) each symbol from `start_index`,
/// extracting the occupied subcarriers. Demodulates `n_symbols` symbols, or
/// as many as fit when n_symbols == 0; fails if less than one slot fits.
inline GridMatrix ofdm_demodulate(const SampledSignal& bb, const Numerology& num,
                                  const SyncResult& sync, std::size_t n_symbols = 0) {
    if (bb.is_real()) throw InputError("ofdm_demodulate expects complex baseband");
    const auto& x = bb.cx();
    if (sync.start_index >= x.size()) throw SyncError("start index out of bounds");

    const std::size_t nfft = num.fft_size;
    const std::size_t n_sc = num.n_subcarriers();
    const std::size_t avail = x.size() - sync.start_index;

    std::size_t fit = 0, used = 0;
    while (true) {
        const std::size_t span = ofdm_symbol_span(num, fit);
        if (used + span > avail) break;
        used += span;
        ++fit;
        if (n_symbols != 0 && fit == n_symbols) break;
    }
    if (n_symbols != 0 && fit < n_symbols)
        throw InputError("signal truncated: requested symbols do not fit");
    if (fit < num.symbols_per_slot)
        throw InputError("signal truncated: less than one slot after start index");

    GridMatrix grid(fit, n_sc);
    std::vector<cplx> blk(nfft);
    std::size_t pos = sync.start_index;
    for (std::size_t sym = 0; sym < fit; ++sym) {
        const std::size_t cp = cp_of_symbol(num, sym);
        for (std::size_t i = 0; i < nfft; ++i) blk[i] = x[pos + cp + i];
        fft_unitary(blk);
        for (std::size_t sc = 0; sc < n_sc; ++sc)
            grid.at(sym, sc) = blk[subcarrier_to_bin(sc, n_sc, nfft)];
        pos += cp + nfft;
    }
    return grid;
}

}  // namespace rofso
