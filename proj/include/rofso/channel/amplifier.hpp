// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "rofso/errors.hpp"
#include "rofso/rng.hpp"
#include "rofso/signal.hpp"

namespace rofso {

/// Gain + NF amplifier. Input-referred noise power is kTB(F-1) with B equal
/// to the stage sample rate at unit impedance; the convention is stated in
/// every report because the bench has no absolute power calibration.
struct AmplifierModel {
    double gain_db = 30.0;
    double noise_figure_db = 6.0;
    double ref_temp_k = 290.0;

    void validate() const {
        if (!std::isfinite(gain_db)) throw ConfigError("amplifier gain must be finite");
        if (noise_figure_db < 0.0) throw ConfigError("noise figure must be >= 0 dB");
    }

    double input_noise_power(double bandwidth_hz) const {
        const double f = db_to_lin_pow(noise_figure_db);
        return kBoltzmann * ref_temp_k * bandwidth_hz * (f - 1.0);
    }
};

inline SampledSignal noisy_amplify(const SampledSignal& sig, const AmplifierModel& a,
                                   std::uint64_t seed) {
    if (!sig.is_real()) throw InputError("amplifier expects a real signal");
    a.validate();
    const double g = db_to_lin_amp(a.gain_db);
    const double sigma = std::sqrt(a.input_noise_power(sig.rate_hz()));
    std::vector<double> out(sig.size());
    const auto& x = sig.re();
    if (sigma > 0.0) {
        Rng rng(seed);
        for (std::size_t n = 0; n < x.size(); ++n) out[n] = g * (x[n] + sigma * rng.gauss());
    } else {
        for (std::size_t n = 0; n < x.size(); ++n) out[n] = g * x[n];
    }
    SampledSignal y = SampledSignal::real(std::move(out), sig.rate_hz());
    y.meta = sig.meta;
    y.meta.history.push_back("amplify");
    return y;
}

/// Add white Gaussian noise sized against the measured signal power.
/// snr_db = +infinity passes the signal through untouched.
inline SampledSignal add_awgn(const SampledSignal& sig, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) return sig;
    const double p = sig.mean_power();
    if (p <= 0.0) throw InputError("zero-power signal: SNR undefined");
    const double noise_pow = p * db_to_lin_pow(-snr_db);
    Rng rng(seed);
    if (sig.is_real()) {
        const double sigma = std::sqrt(noise_pow);
        std::vector<double> out(sig.size());
        const auto& x = sig.re();
        for (std::size_t n = 0; n < x.size(); ++n) out[n] = x[n] + sigma * rng.gauss();
        SampledSignal y = SampledSignal::real(std::move(out), sig.rate_hz());
        y.meta = sig.meta;
        y.meta.history.push_back("awgn");
        return y;
    }
    const double sigma = std::sqrt(noise_pow);  // total complex variance
    std::vector<cplx> out(sig.size());
    const auto& x = sig.cx();
    for (std::size_t n = 0; n < x.size(); ++n) out[n] = x[n] + sigma * rng.gauss_cplx();
    SampledSignal y = SampledSignal::complex(std::move(out), sig.rate_hz());
    y.meta = sig.meta;
    y.meta.history.push_back("awgn");
    return y;
}

}  // namespace rofso
