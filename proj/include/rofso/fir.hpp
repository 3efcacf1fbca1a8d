// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rofso/fft.hpp"
#include "rofso/signal.hpp"

namespace rofso {

namespace detail {

inline double bessel_i0(double x) {
    // power series, converges fast for the beta range used here
    double sum = 1.0, term = 1.0;
    const double half_x = x / 2.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half_x / k) * (half_x / k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

inline double kaiser_beta(double atten_db) {
    if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
    if (atten_db >= 21.0) return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
    return 0.0;
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

}  // namespace detail

inline std::vector<double> kaiser_window(std::size_t n, double beta) {
    std::vector<double> w(n);
    const double denom = detail::bessel_i0(beta);
    const double mid = static_cast<double>(n - 1) / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = (static_cast<double>(k) - mid) / mid;
        w[k] = detail::bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
    }
    return w;
}

/// Kaiser-windowed sinc lowpass. cutoff_norm / transition_norm are fractions
/// of the sample rate (0..0.5). Tap count is derived from the attenuation
/// target and forced odd (type-I linear phase).
inline std::vector<double> design_kaiser_lowpass(double cutoff_norm, double transition_norm,
                                                 double atten_db) {
    if (cutoff_norm <= 0.0 || cutoff_norm >= 0.5) throw DspError("lowpass cutoff out of range");
    if (transition_norm <= 0.0) throw DspError("transition width must be positive");
    std::size_t n = static_cast<std::size_t>(
        std::ceil((atten_db - 7.95) / (2.285 * 2.0 * kPi * transition_norm)));
    n = std::max<std::size_t>(n, 11);
    if (n % 2 == 0) ++n;
    const auto w = kaiser_window(n, detail::kaiser_beta(atten_db));
    std::vector<double> h(n);
    const double mid = static_cast<double>(n - 1) / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        h[k] = 2.0 * cutoff_norm * detail::sinc(2.0 * cutoff_norm * (static_cast<double>(k) - mid)) * w[k];
    }
    return h;
}

/// Bandpass from a lowpass prototype half-width `half_bw_norm` modulated to
/// `center_norm` (both fractions of the sample rate).
inline std::vector<double> design_kaiser_bandpass(double center_norm, double half_bw_norm,
                                                  double transition_norm, double atten_db) {
    auto lp = design_kaiser_lowpass(half_bw_norm, transition_norm, atten_db);
    const double mid = static_cast<double>(lp.size() - 1) / 2.0;
    for (std::size_t k = 0; k < lp.size(); ++k) {
        lp[k] *= 2.0 * std::cos(2.0 * kPi * center_norm * (static_cast<double>(k) - mid));
    }
    return lp;
}

/// Complex frequency response of a real-tap FIR at normalized frequency
/// f (fraction of sample rate).
inline cplx fir_response(const std::vector<double>& taps, double f_norm) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < taps.size(); ++k) {
        const double a = -2.0 * kPi * f_norm * static_cast<double>(k);
        acc += taps[k] * cplx{std::cos(a), std::sin(a)};
    }
    return acc;
}

namespace detail {

// Linear convolution y_full[i] = sum_k h[k] x[i-k] via overlap-save blocks.
template <typename T>
std::vector<T> convolve_os(const std::vector<T>& x, const std::vector<double>& h) {
    const std::size_t nh = h.size();
    const std::size_t nfft = std::max<std::size_t>(next_pow2(4 * nh), 16384);
    const std::size_t useful = nfft - nh + 1;

    std::vector<cplx> hf(nfft, 0.0);
    for (std::size_t k = 0; k < nh; ++k) hf[k] = h[k];
    fft_pow2(hf, false);

    const std::size_t ny = x.size() + nh - 1;
    std::vector<T> y(ny);
    std::vector<cplx> blk(nfft);
    for (std::size_t out0 = 0; out0 < ny; out0 += useful) {
        // block input covers x[out0 - nh + 1 .. out0 + useful - 1]
        for (std::size_t i = 0; i < nfft; ++i) {
            const std::ptrdiff_t xi =
                static_cast<std::ptrdiff_t>(out0) - static_cast<std::ptrdiff_t>(nh) + 1 +
                static_cast<std::ptrdiff_t>(i);
            blk[i] = (xi >= 0 && xi < static_cast<std::ptrdiff_t>(x.size()))
                         ? cplx(x[static_cast<std::size_t>(xi)])
                         : cplx(0.0);
        }
        fft_pow2(blk, false);
        for (std::size_t i = 0; i < nfft; ++i) blk[i] *= hf[i];
        fft_pow2(blk, true);
        const double scale = 1.0 / static_cast<double>(nfft);
        const std::size_t count = std::min(useful, ny - out0);
        for (std::size_t i = 0; i < count; ++i) {
            const cplx v = blk[nh - 1 + i] * scale;
            if constexpr (std::is_same_v<T, double>) {
                y[out0 + i] = v.real();
            } else {
                y[out0 + i] = v;
            }
        }
    }
    return y;
}

template <typename T>
std::vector<T> convolve_direct(const std::vector<T>& x, const std::vector<double>& h) {
    const std::size_t nh = h.size();
    const std::size_t ny = x.size() + nh - 1;
    std::vector<T> y(ny, T{});
    for (std::size_t i = 0; i < ny; ++i) {
        const std::size_t kmin = (i >= x.size()) ? i - x.size() + 1 : 0;
        const std::size_t kmax = std::min(nh - 1, i);
        T acc{};
        for (std::size_t k = kmin; k <= kmax; ++k) acc += h[k] * x[i - k];
        y[i] = acc;
    }
    return y;
}

}  // namespace detail

/// Filter with a linear-phase FIR and compensate the (n-1)/2 group delay, so
/// the output is time-aligned with the input and has the same length.
template <typename T>
std::vector<T> fir_filter(const std::vector<T>& x, const std::vector<double>& taps) {
    if (taps.empty() || x.empty()) return x;
    if (taps.size() % 2 == 0) throw DspError("fir_filter expects odd-length linear-phase taps");
    std::vector<T> full = (taps.size() >= 192 && x.size() >= 4 * taps.size())
                              ? detail::convolve_os(x, taps)
                              : detail::convolve_direct(x, taps);
    const std::size_t d = (taps.size() - 1) / 2;
    std::vector<T> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = full[i + d];
    return y;
}

struct ResamplerSpec {
    double pass_frac = 0.65;  // passband edge as a fraction of the narrower Nyquist
    double atten_db = 80.0;   // stopband attenuation / passband ripple target
};

/// Kaiser prototype for a polyphase L/M resampler; length 2*K*L+1 so the
/// group delay lands on the polyphase grid.
inline std::vector<double> design_resampler_taps(std::size_t L, std::size_t M,
                                                 const ResamplerSpec& spec = {}) {
    const double side = static_cast<double>(std::max(L, M));
    const double pass = 0.5 * spec.pass_frac / side;  // normalized to the upsampled rate
    const double stop = 0.5 / side;
    const double fc = 0.5 * (pass + stop);
    const double df = stop - pass;
    std::size_t n = static_cast<std::size_t>(
        std::ceil((spec.atten_db - 7.95) / (2.285 * 2.0 * kPi * df)));
    const std::size_t K = std::max<std::size_t>(1, (n + 2 * L - 1) / (2 * L));
    n = 2 * K * L + 1;
    const auto w = kaiser_window(n, detail::kaiser_beta(spec.atten_db));
    std::vector<double> h(n);
    const double mid = static_cast<double>(n - 1) / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        h[k] = static_cast<double>(L) * 2.0 * fc *
               detail::sinc(2.0 * fc * (static_cast<double>(k) - mid)) * w[k];
    }
    return h;
}

/// Rational polyphase resampler, output rate = input rate * L / M. Output
/// sample m lands at input time m*M/L; the prototype delay is absorbed so
/// output[0] aligns with input[0].
template <typename T>
std::vector<T> resample_rational(const std::vector<T>& x, std::size_t L, std::size_t M,
                                 const std::vector<double>& taps) {
    if (L == 0 || M == 0) throw DspError("resampler factors must be nonzero");
    if (L == 1 && M == 1) return x;
    const std::size_t nh = taps.size();
    const std::size_t D = (nh - 1) / 2;  // = K*L by construction
    const std::size_t n_out =
        static_cast<std::size_t>((static_cast<unsigned long long>(x.size()) * L + M - 1) / M);
    std::vector<T> y(n_out, T{});
    const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x.size());
    for (std::size_t m = 0; m < n_out; ++m) {
        const unsigned long long u = static_cast<unsigned long long>(m) * M + D;
        const std::size_t p = static_cast<std::size_t>(u % L);
        const std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(u / L);
        T acc{};
        // taps at p, p+L, p+2L, ... paired with x[i0], x[i0-1], ...
        std::size_t k = p;
        std::ptrdiff_t xi = i0;
        // skip leading taps that index past the end of x
        while (xi >= nx && k < nh) {
            k += L;
            --xi;
        }
        for (; k < nh && xi >= 0; k += L, --xi) acc += taps[k] * x[xi];
        y[m] = acc;
    }
    return y;
}

}  // namespace rofso
