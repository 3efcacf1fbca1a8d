// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "rofso/fir.hpp"
#include "rofso/numerology.hpp"
#include "rofso/signal.hpp"

namespace rofso {

namespace detail {

/// exp(+/-j 2 pi f n / fs) generator. When f/fs is rational with a small
/// denominator (every bench default is), a periodic table makes the phase
/// exact over arbitrarily long runs.
class Nco {
  public:
    Nco(double freq_hz, double rate_hz, bool negative) {
        const double ratio = freq_hz / rate_hz;
        const std::uint64_t fi = static_cast<std::uint64_t>(freq_hz);
        const std::uint64_t ri = static_cast<std::uint64_t>(rate_hz);
        if (fi > 0 && ri > 0 && static_cast<double>(fi) == freq_hz &&
            static_cast<double>(ri) == rate_hz) {
            const std::uint64_t g = std::gcd(fi, ri);
            const std::uint64_t q = ri / g;
            if (q <= (1u << 20)) {
                table_.resize(q);
                for (std::uint64_t n = 0; n < q; ++n) {
                    const double a = 2.0 * kPi * ratio * static_cast<double>(n);
                    table_[n] = {std::cos(a), negative ? -std::sin(a) : std::sin(a)};
                }
                return;
            }
        }
        step_ = 2.0 * kPi * ratio * (negative ? -1.0 : 1.0);
    }

    cplx at(std::size_t n) const {
        if (!table_.empty()) return table_[n % table_.size()];
        return {std::cos(step_ * static_cast<double>(n)), std::sin(step_ * static_cast<double>(n))};
    }

  private:
    std::vector<cplx> table_;
    double step_ = 0.0;
};

}  // namespace detail

/// Upconvert complex baseband to a real passband stream: polyphase resample
/// to the passband rate, mix to the carrier, take the real part scaled by
/// sqrt(2) so passband power equals baseband power. The resample and mix are
/// fused so the intermediate complex stream is never materialized.
inline SampledSignal upconvert_to_passband(const SampledSignal& bb, const CarrierConfig& carrier,
                                           const ResamplerSpec& rs = {}) {
    if (bb.is_real()) throw InputError("upconvert expects a complex baseband signal");
    carrier.validate();

    const double ratio = carrier.passband_rate_hz / bb.rate_hz();
    const std::size_t L = static_cast<std::size_t>(ratio + 0.5);
    if (std::abs(ratio - static_cast<double>(L)) > 1e-9 || L < 1)
        throw ConfigError("passband rate must be an integer multiple of the baseband rate");

    const auto& x = bb.cx();
    std::vector<double> out;

    if (L == 1) {
        detail::Nco nco(carrier.carrier_hz, carrier.passband_rate_hz, false);
        out.resize(x.size());
        const double s = std::sqrt(2.0);
        for (std::size_t n = 0; n < x.size(); ++n) out[n] = s * (x[n] * nco.at(n)).real();
    } else {
        const auto taps = design_resampler_taps(L, 1, rs);
        const std::size_t nh = taps.size();
        const std::size_t D = (nh - 1) / 2;  // = K*L
        const std::size_t n_out = x.size() * L;
        out.resize(n_out);
        detail::Nco nco(carrier.carrier_hz, carrier.passband_rate_hz, false);
        const double s = std::sqrt(2.0);
        const std::ptrdiff_t nx = static_cast<std::ptrdiff_t>(x.size());
        for (std::size_t m = 0; m < n_out; ++m) {
            const std::size_t u = m + D;
            const std::size_t p = u % L;
            std::ptrdiff_t xi = static_cast<std::ptrdiff_t>(u / L);
            cplx acc{0.0, 0.0};
            std::size_t k = p;
            while (xi >= nx && k < nh) {
                k += L;
                --xi;
            }
            for (; k < nh && xi >= 0; k += L, --xi) acc += taps[k] * x[xi];
            out[m] = s * (acc * nco.at(m)).real();
        }
    }

    SampledSignal sig = SampledSignal::real(std::move(out), carrier.passband_rate_hz);
    sig.meta = bb.meta;
    sig.meta.carrier_hz = carrier.carrier_hz;
    sig.meta.history.push_back("upconvert");
    return sig;
}

/// Fixed-NCO downconversion: mix the real passband signal to baseband and
/// polyphase-decimate to the target rate. Gain sqrt(2) undoes the upconvert
/// scaling. This is the carrier-recovery fallback path (zero assumed CFO)
/// and the reference receiver for loopback tests.
inline SampledSignal nco_downconvert(const SampledSignal& pb, double carrier_hz,
                                     double out_rate_hz, const ResamplerSpec& rs = {}) {
    if (!pb.is_real()) throw InputError("downconvert expects a real passband signal");
    const double ratio = pb.rate_hz() / out_rate_hz;
    const std::size_t M = static_cast<std::size_t>(ratio + 0.5);
    if (std::abs(ratio - static_cast<double>(M)) > 1e-9 || M < 1)
        throw ConfigError("passband rate must be an integer multiple of the output rate");

    const auto& x = pb.re();
    detail::Nco nco(carrier_hz, pb.rate_hz(), true);
    const double s = std::sqrt(2.0);

    std::vector<cplx> bb;
    if (M == 1) {
        bb.resize(x.size());
        for (std::size_t n = 0; n < x.size(); ++n) bb[n] = s * x[n] * nco.at(n);
        // remove the image at 2*carrier
        bb = fir_filter(bb, design_kaiser_lowpass(0.45, 0.05, 60.0));
    } else {
        // mix + decimate in blocks so the full-rate complex stream is never
        // held in memory (it would be ~2x the passband buffer)
        const auto taps = design_resampler_taps(1, M, rs);
        const std::size_t nh = taps.size();
        const std::size_t D = (nh - 1) / 2;
        const std::size_t n_out = (x.size() + M - 1) / M;
        bb.resize(n_out);

        const std::size_t out_chunk = 1 << 14;  // ~1.3M passband samples per block
        std::vector<cplx> mixed;
        for (std::size_t m0 = 0; m0 < n_out; m0 += out_chunk) {
            const std::size_t m1 = std::min(m0 + out_chunk, n_out);
            // outputs m0..m1-1 read passband indices [m0*M + D - nh + 1, (m1-1)*M + D]
            const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(m0 * M + D) -
                                      static_cast<std::ptrdiff_t>(nh) + 1;
            const std::ptrdiff_t hi = static_cast<std::ptrdiff_t>((m1 - 1) * M + D);
            mixed.assign(static_cast<std::size_t>(hi - lo + 1), cplx{0.0, 0.0});
            for (std::ptrdiff_t n = std::max<std::ptrdiff_t>(lo, 0);
                 n <= std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(x.size()) - 1);
                 ++n) {
                mixed[static_cast<std::size_t>(n - lo)] =
                    s * x[static_cast<std::size_t>(n)] * nco.at(static_cast<std::size_t>(n));
            }
            for (std::size_t m = m0; m < m1; ++m) {
                const std::size_t u = m * M + D;
                cplx acc{0.0, 0.0};
                const std::size_t base = static_cast<std::size_t>(
                    static_cast<std::ptrdiff_t>(u) - lo);  // index of u in mixed
                for (std::size_t k = 0; k < nh; ++k) acc += taps[k] * mixed[base - k];
                bb[m] = acc;
            }
        }
    }

    SampledSignal sig = SampledSignal::complex(std::move(bb), out_rate_hz);
    sig.meta = pb.meta;
    sig.meta.history.push_back("nco_downconvert");
    return sig;
}

}  // namespace rofso
