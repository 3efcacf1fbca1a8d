// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "rofso/fft.hpp"
#include "rofso/numerology.hpp"
#include "rofso/signal.hpp"
#include "rofso/test_model.hpp"

namespace rofso {

/// Subcarrier k (0..n_sc-1) sits at signed offset k - n_sc/2 from the
/// carrier; k = n_sc/2 is the DC subcarrier.
inline std::size_t subcarrier_to_bin(std::size_t sc, std::size_t n_sc, std::size_t fft_size) {
    const std::ptrdiff_t q =
        static_cast<std::ptrdiff_t>(sc) - static_cast<std::ptrdiff_t>(n_sc / 2);
    return static_cast<std::size_t>((q + static_cast<std::ptrdiff_t>(fft_size)) %
                                    static_cast<std::ptrdiff_t>(fft_size));
}

inline std::size_t cp_of_symbol(const Numerology& num, std::size_t sym) {
    return num.cp_lengths[sym % num.symbols_per_subframe()];
}

inline std::size_t ofdm_symbol_span(const Numerology& num, std::size_t sym) {
    return cp_of_symbol(num, sym) + num.fft_size;
}

inline std::size_t ofdm_waveform_length(const Numerology& num, std::size_t n_symbols) {
    std::size_t total = 0;
    for (std::size_t s = 0; s < n_symbols; ++s) total += ofdm_symbol_span(num, s);
    return total;
}

/// CP-OFDM modulator, unitary IFFT. window_w > 0 applies raised-cosine edge
/// windowing: the first window_w samples of each CP ramp up and a window_w
/// cyclic suffix ramps down into the next symbol (weighted overlap-add).
/// The FFT-window samples of every symbol are left untouched, so a
/// perfectly timed demodulation is still exact.
inline SampledSignal ofdm_modulate(const GridMatrix& grid, const Numerology& num,
                                   std::size_t window_w = 0) {
    if (grid.n_subcarriers != num.n_subcarriers())
        throw ConfigError("grid width does not match numerology");
    if (grid.n_subcarriers > num.fft_size)
        throw ConfigError("occupied subcarriers exceed fft size");
    for (std::size_t cp : num.cp_lengths) {
        if (window_w > cp) throw ConfigError("window overlap exceeds the shortest CP");
    }

    const std::size_t n_sc = grid.n_subcarriers;
    const std::size_t nfft = num.fft_size;
    const std::size_t total = ofdm_waveform_length(num, grid.n_symbols);
    std::vector<cplx> out(total + window_w, cplx{0.0, 0.0});

    std::vector<double> rise(window_w);
    for (std::size_t w = 0; w < window_w; ++w) {
        rise[w] = 0.5 * (1.0 - std::cos(kPi * (static_cast<double>(w) + 0.5) /
                                        static_cast<double>(window_w)));
    }

    std::vector<cplx> x(nfft);
    std::size_t pos = 0;
    for (std::size_t sym = 0; sym < grid.n_symbols; ++sym) {
        std::fill(x.begin(), x.end(), cplx{0.0, 0.0});
        for (std::size_t sc = 0; sc < n_sc; ++sc)
            x[subcarrier_to_bin(sc, n_sc, nfft)] = grid.at(sym, sc);
        ifft_unitary(x);

        const std::size_t cp = cp_of_symbol(num, sym);
        const std::size_t span = cp + nfft;
        for (std::size_t j = 0; j < span; ++j) {
            cplx v = (j < cp) ? x[nfft - cp + j] : x[j - cp];
            if (window_w > 0 && j < window_w) v *= rise[j];
            out[pos + j] += v;
        }
        if (window_w > 0) {
            for (std::size_t w = 0; w < window_w; ++w)
                out[pos + span + w] += x[w] * (1.0 - rise[w]);
        }
        pos += span;
    }

    SampledSignal sig = SampledSignal::complex(std::move(out), num.sample_rate_hz);
    sig.meta.description = "ofdm baseband";
    return sig;
}

/// Time-domain waveform of a single OFDM symbol (CP included), used as the
/// frame-sync cross-correlation template.
inline std::vector<cplx> ofdm_symbol_waveform(const GridMatrix& grid, const Numerology& num,
                                              std::size_t sym) {
    const std::size_t n_sc = grid.n_subcarriers;
    const std::size_t nfft = num.fft_size;
    std::vector<cplx> x(nfft, cplx{0.0, 0.0});
    for (std::size_t sc = 0; sc < n_sc; ++sc)
        x[subcarrier_to_bin(sc, n_sc, nfft)] = grid.at(sym, sc);
    ifft_unitary(x);
    const std::size_t cp = cp_of_symbol(num, sym);
    std::vector<cplx> w(cp + nfft);
    for (std::size_t j = 0; j < cp; ++j) w[j] = x[nfft - cp + j];
    for (std::size_t j = 0; j < nfft; ++j) w[cp + j] = x[j];
    return w;
}

}  // namespace rofso
