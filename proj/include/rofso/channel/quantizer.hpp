// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "rofso/errors.hpp"
#include "rofso/signal.hpp"

namespace rofso {

/// Midtread uniform quantizer with 2^bits levels over [-full_scale,
/// +full_scale). Codes run -2^(b-1) .. 2^(b-1)-1; out-of-range input clips
/// to the extreme codes.
struct QuantizerModel {
    unsigned bits = 10;
    double full_scale = 1.0;

    void validate() const {
        if (bits < 2 || bits > 24) throw ConfigError("quantizer bits out of range");
        if (full_scale <= 0.0) throw ConfigError("quantizer full scale must be positive");
    }

    double step() const { return 2.0 * full_scale / std::pow(2.0, bits); }

    double apply(double x) const {
        const double d = step();
        const double lo = -std::pow(2.0, bits - 1);
        const double hi = std::pow(2.0, bits - 1) - 1.0;
        double code = std::round(x / d);
        code = std::min(hi, std::max(lo, code));
        return code * d;
    }
};

inline SampledSignal quantize(const SampledSignal& sig, const QuantizerModel& q) {
    if (!sig.is_real()) throw InputError("quantizer expects a real signal");
    q.validate();
    std::vector<double> out(sig.size());
    const auto& x = sig.re();
    for (std::size_t n = 0; n < x.size(); ++n) out[n] = q.apply(x[n]);
    SampledSignal y = SampledSignal::real(std::move(out), sig.rate_hz());
    y.meta = sig.meta;
    y.meta.history.push_back("quantize" + std::to_string(q.bits));
    return y;
}

}  // namespace rofso
