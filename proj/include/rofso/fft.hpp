// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <unordered_map>
#include <vector>

#include "rofso/errors.hpp"
#include "rofso/signal.hpp"

namespace rofso {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct FftTables {
    std::vector<cplx> twiddle;       // exp(-j 2 pi k / n), k < n/2
    std::vector<std::uint32_t> rev;  // bit-reversal permutation
};

inline const FftTables& fft_tables(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<FftTables>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;

    auto t = std::make_unique<FftTables>();
    t->twiddle.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double a = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        t->twiddle[k] = {std::cos(a), std::sin(a)};
    }
    t->rev.resize(n);
    std::uint32_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t r = 0;
        for (std::uint32_t b = 0; b < log2n; ++b) r |= ((i >> b) & 1u) << (log2n - 1 - b);
        t->rev[i] = r;
    }
    const FftTables& ref = *t;
    cache.emplace(n, std::move(t));
    return ref;
}

}  // namespace detail

/// In-place radix-2 FFT, unnormalized. inverse=true computes the unscaled
/// inverse transform (conjugate twiddles, no 1/n).
inline void fft_pow2(std::vector<cplx>& x, bool inverse = false) {
    const std::size_t n = x.size();
    if (n <= 1) return;
    if (!detail::is_pow2(n)) throw DspError("fft size must be a power of two");
    const auto& t = detail::fft_tables(n);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = t.rev[i];
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = t.twiddle[k * step];
                if (inverse) w = std::conj(w);
                const cplx odd = x[base + k + half] * w;
                const cplx even = x[base + k];
                x[base + k] = even + odd;
                x[base + k + half] = even - odd;
            }
        }
    }
}

/// Unitary transforms (1/sqrt(n) both directions) so Parseval holds with
/// unit constants.
inline void fft_unitary(std::vector<cplx>& x) {
    fft_pow2(x, false);
    const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (auto& v : x) v *= s;
}

inline void ifft_unitary(std::vector<cplx>& x) {
    fft_pow2(x, true);
    const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (auto& v : x) v *= s;
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace rofso
