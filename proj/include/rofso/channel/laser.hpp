// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rofso/errors.hpp"
#include "rofso/signal.hpp"

namespace rofso {

/// Piecewise-linear P-I model of the directly modulated laser. Defaults are
/// the published curve endpoints: threshold 420 mA and 21 mW at 670 mA
/// (slope 0.084 mW/mA); the bias point sits mid-segment.
struct LaserModel {
    double i_threshold_ma = 420.0;
    double slope_mw_per_ma = 0.084;
    double i_bias_ma = 545.0;
    double mod_gain_ma_per_unit = 35.0;

    void validate() const {
        if (i_threshold_ma >= i_bias_ma) throw ConfigError("laser must be biased above threshold");
        if (slope_mw_per_ma <= 0.0) throw ConfigError("laser slope efficiency must be positive");
    }

    double power_mw_at(double i_ma) const {
        return slope_mw_per_ma * std::max(0.0, i_ma - i_threshold_ma);
    }
};

/// Drive the laser with the RF waveform: i(t) = bias + mod_gain * v(t),
/// P(t) = slope * max(0, i - threshold). Output is the optical power
/// waveform in mW; sub-threshold clipping is the modeled impairment.
inline SampledSignal laser_pi_transfer(const SampledSignal& sig, const LaserModel& m) {
    if (!sig.is_real()) throw InputError("laser drive must be a real signal");
    m.validate();
    std::vector<double> out(sig.size());
    const auto& x = sig.re();
    for (std::size_t n = 0; n < x.size(); ++n) {
        out[n] = m.power_mw_at(m.i_bias_ma + m.mod_gain_ma_per_unit * x[n]);
    }
    SampledSignal y = SampledSignal::real(std::move(out), sig.rate_hz());
    y.meta = sig.meta;
    y.meta.history.push_back("laser_pi");
    return y;
}

}  // namespace rofso
