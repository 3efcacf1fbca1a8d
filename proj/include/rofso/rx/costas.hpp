// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "rofso/errors.hpp"
#include "rofso/fir.hpp"
#include "rofso/passband.hpp"
#include "rofso/signal.hpp"

namespace rofso {

/// Second-order digital Costas loop for carrier recovery of the real
/// passband signal.
struct CostasConfig {
    double nominal_carrier_hz = 627e6;
    double loop_bandwidth_hz = 500.0;
    double damping = 0.7071067811865476;
    double prefilter_bw_hz = 200e3;  // one-pole filter feeding the phase detector
    double output_rate_hz = 30.72e6;
    double settle_time_s = 1e-3;
    double lock_error_var_max = 0.02;   // error variance after settle
    double lock_min_power_rel = 1e-6;   // prefiltered power vs input power
    std::size_t trace_stride = 2048;    // NCO trace decimation

    void validate() const {
        if (damping <= 0.0) throw ConfigError("damping must be positive");
        if (loop_bandwidth_hz <= 0.0 || loop_bandwidth_hz >= nominal_carrier_hz / 10.0)
            throw ConfigError("loop bandwidth must be small against the carrier");
    }
};

struct CostasResult {
    SampledSignal baseband;           // complex, at output_rate_hz
    std::vector<double> trace_index;  // passband sample index of each trace row
    std::vector<double> trace_freq_hz;
    std::vector<double> trace_phase_rad;
    bool locked = false;
    double error_variance = 0.0;
    double final_freq_hz = 0.0;
};

/// Run the loop and return the downconverted baseband plus the NCO trace.
/// No-lock is reported in the result; costas_downconvert() throws instead.
inline CostasResult costas_downconvert_try(const SampledSignal& sig, const CostasConfig& cfg) {
    if (!sig.is_real()) throw InputError("costas loop expects a real passband signal");
    cfg.validate();
    const double fs = sig.rate_hz();
    const auto& x = sig.re();

    const double ratio = fs / cfg.output_rate_hz;
    const std::size_t M = static_cast<std::size_t>(ratio + 0.5);
    if (std::abs(ratio - static_cast<double>(M)) > 1e-9 || M < 1)
        throw ConfigError("passband rate must be an integer multiple of the output rate");

    // loop gains, GNU Radio style, for a normalized detector slope of 1
    const double theta = 2.0 * kPi * cfg.loop_bandwidth_hz / fs;
    const double denom = 1.0 + 2.0 * cfg.damping * theta + theta * theta;
    const double alpha = 4.0 * cfg.damping * theta / denom;
    const double beta = 4.0 * theta * theta / denom;

    const detail::Nco nco(cfg.nominal_carrier_hz, fs, true);
    const double pf_a = 1.0 - std::exp(-2.0 * kPi * cfg.prefilter_bw_hz / fs);

    // polyphase decimator fed sample-by-sample through a ring buffer
    const auto taps = (M > 1) ? design_resampler_taps(1, M) : std::vector<double>{1.0};
    const std::size_t nh = taps.size();
    const std::size_t D = (nh - 1) / 2;
    std::vector<cplx> ring(nh, cplx{0.0, 0.0});
    std::vector<cplx> bb;
    bb.reserve(x.size() / M + 1);

    const std::size_t settle = std::min<std::size_t>(
        x.size(), static_cast<std::size_t>(cfg.settle_time_s * fs));
    double phase = 0.0, freq = 0.0;  // residual on top of the nominal NCO
    cplx pf{0.0, 0.0};
    double err_acc = 0.0, err2_acc = 0.0, pf_pow_acc = 0.0;
    std::size_t stat_n = 0;

    CostasResult res;
    const double sqrt2 = std::sqrt(2.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
        const cplx rot{std::cos(phase), -std::sin(phase)};
        const cplx z = sqrt2 * x[n] * nco.at(n) * rot;

        ring[n % nh] = z;
        if (n >= D && (n - D) % M == 0) {
            cplx acc{0.0, 0.0};
            for (std::size_t k = 0; k < nh; ++k) {
                const std::size_t idx = (n + nh - k) % nh;
                acc += taps[k] * ring[idx];
            }
            bb.push_back(acc);
        }

        pf += pf_a * (z - pf);
        const double mag2 = std::norm(pf);
        const double e = mag2 > 1e-300 ? pf.real() * pf.imag() / mag2 : 0.0;

        freq += beta * e;
        phase += freq + alpha * e;
        if (phase > kPi) phase -= 2.0 * kPi;
        if (phase < -kPi) phase += 2.0 * kPi;

        if (n >= settle) {
            err_acc += e;
            err2_acc += e * e;
            pf_pow_acc += mag2;
            ++stat_n;
        }
        if (n % cfg.trace_stride == 0) {
            res.trace_index.push_back(static_cast<double>(n));
            res.trace_freq_hz.push_back(cfg.nominal_carrier_hz + freq * fs / (2.0 * kPi));
            res.trace_phase_rad.push_back(phase);
        }
    }

    res.final_freq_hz = cfg.nominal_carrier_hz + freq * fs / (2.0 * kPi);
    const double in_pow = sig.mean_power();
    if (stat_n > 0) {
        const double mean_e = err_acc / static_cast<double>(stat_n);
        res.error_variance = err2_acc / static_cast<double>(stat_n) - mean_e * mean_e;
        const double pf_pow = pf_pow_acc / static_cast<double>(stat_n);
        res.locked = pf_pow > cfg.lock_min_power_rel * std::max(in_pow, 1e-300) &&
                     in_pow > 0.0 && res.error_variance < cfg.lock_error_var_max;
    }

    res.baseband = SampledSignal::complex(std::move(bb), cfg.output_rate_hz);
    res.baseband.meta = sig.meta;
    res.baseband.meta.history.push_back("costas_downconvert");
    return res;
}

/// Spec-facing entry point: throws when the lock indicator stays false
/// after the settle time.
inline CostasResult costas_downconvert(const SampledSignal& sig, const CostasConfig& cfg) {
    CostasResult res = costas_downconvert_try(sig, cfg);
    if (!res.locked)
        throw LockError("costas loop failed to lock within the settle time (error variance " +
                        std::to_string(res.error_variance) + ")");
    return res;
}

}  // namespace rofso
