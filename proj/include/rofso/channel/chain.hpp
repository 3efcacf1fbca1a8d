// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rofso/channel/amplifier.hpp"
#include "rofso/channel/laser.hpp"
#include "rofso/channel/quantizer.hpp"
#include "rofso/channel/response.hpp"
#include "rofso/fft.hpp"
#include "rofso/fir.hpp"
#include "rofso/rng.hpp"
#include "rofso/signal.hpp"

namespace rofso {

struct QuantizerStage {
    unsigned bits = 10;
    double full_scale = 0.0;          // absolute clip level; 0 = derive from input
    double full_scale_rms_mult = 4.0;  // clip level = mult * input RMS when deriving
};

struct LaserStage {
    LaserModel model;
    bool normalize_drive = true;  // scale input to unit RMS before the P-I map
};

struct ResponseFilterStage {
    FrequencyResponse response;
    std::size_t n_taps = 255;
    std::string label = "fir";
};

struct BandpassStage {
    double center_hz = 0.0;
    double half_bw_hz = 0.0;
    double transition_hz = 6e6;
    double atten_db = 50.0;
};

struct AmplifierStage {
    AmplifierModel model;
};

struct AwgnStage {
    double snr_db = 30.0;
};

struct GainStage {
    double gain_db = 0.0;
};

struct DcBlockStage {};

struct ResampleStage {
    double rate_hz = 0.0;
};

struct BrickwallStage {
    double f_lo_hz = 0.0;
    double f_hi_hz = 0.0;
};

using Stage = std::variant<QuantizerStage, LaserStage, ResponseFilterStage, BandpassStage,
                           AmplifierStage, AwgnStage, GainStage, DcBlockStage, ResampleStage,
                           BrickwallStage>;

struct StageEntry {
    Stage op;
    double expect_input_rate_hz = 0.0;  // 0 = accept any rate
};

/// Ordered impairment chain with one master seed; each randomized stage gets
/// its own deterministic substream.
struct ChannelChain {
    std::vector<StageEntry> stages;
    std::uint64_t master_seed = 1;
};

inline std::string stage_name(const Stage& s) {
    struct V {
        std::string operator()(const QuantizerStage& q) const {
            return "quantizer" + std::to_string(q.bits);
        }
        std::string operator()(const LaserStage&) const { return "laser"; }
        std::string operator()(const ResponseFilterStage& f) const { return f.label; }
        std::string operator()(const BandpassStage&) const { return "bandpass"; }
        std::string operator()(const AmplifierStage&) const { return "amplifier"; }
        std::string operator()(const AwgnStage&) const { return "awgn"; }
        std::string operator()(const GainStage&) const { return "gain"; }
        std::string operator()(const DcBlockStage&) const { return "dc_block"; }
        std::string operator()(const ResampleStage&) const { return "resample"; }
        std::string operator()(const BrickwallStage&) const { return "brickwall"; }
    };
    return std::visit(V{}, s);
}

/// Zero all spectral content outside [f_lo, f_hi] (mirrored for real
/// signals). Whole-signal FFT; meant for test-scale captures.
inline SampledSignal brickwall_bandpass(const SampledSignal& sig, double f_lo, double f_hi) {
    if (!sig.is_real()) throw InputError("brickwall stage expects a real signal");
    if (f_lo < 0.0 || f_hi <= f_lo || f_hi > sig.rate_hz() / 2.0)
        throw ConfigError("brickwall band outside the representable range");
    const std::size_t n = sig.size();
    const std::size_t nfft = next_pow2(n);
    std::vector<cplx> spec(nfft, cplx{0.0, 0.0});
    const auto& x = sig.re();
    for (std::size_t i = 0; i < n; ++i) spec[i] = x[i];
    fft_pow2(spec, false);
    const double df = sig.rate_hz() / static_cast<double>(nfft);
    for (std::size_t k = 0; k < nfft; ++k) {
        const double f = (k <= nfft / 2) ? static_cast<double>(k) * df
                                         : (static_cast<double>(k) - static_cast<double>(nfft)) * df;
        const double fa = std::abs(f);
        if (fa < f_lo || fa > f_hi) spec[k] = 0.0;
    }
    fft_pow2(spec, true);
    std::vector<double> out(n);
    const double scale = 1.0 / static_cast<double>(nfft);
    for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real() * scale;
    SampledSignal y = SampledSignal::real(std::move(out), sig.rate_hz());
    y.meta = sig.meta;
    y.meta.history.push_back("brickwall");
    return y;
}

namespace detail {

inline SampledSignal apply_stage(SampledSignal sig, const Stage& stage, std::uint64_t seed) {
    struct V {
        SampledSignal sig;
        std::uint64_t seed;

        SampledSignal operator()(const QuantizerStage& s) {
            QuantizerModel q;
            q.bits = s.bits;
            q.full_scale = s.full_scale > 0.0 ? s.full_scale : s.full_scale_rms_mult * sig.rms();
            if (q.full_scale <= 0.0) q.full_scale = 1.0;  // zero input: any scale works
            return quantize(sig, q);
        }
        SampledSignal operator()(const LaserStage& s) {
            if (!s.normalize_drive) return laser_pi_transfer(sig, s.model);
            const double r = sig.rms();
            SampledSignal drive = sig;
            if (r > 0.0) {
                for (auto& v : drive.re()) v /= r;
            }
            return laser_pi_transfer(drive, s.model);
        }
        SampledSignal operator()(const ResponseFilterStage& s) {
            const auto taps = fir_from_measured_response(s.response, sig.rate_hz(), s.n_taps);
            SampledSignal y = SampledSignal::real(fir_filter(sig.re(), taps), sig.rate_hz());
            y.meta = sig.meta;
            y.meta.history.push_back(s.label);
            return y;
        }
        SampledSignal operator()(const BandpassStage& s) {
            const double fs = sig.rate_hz();
            if (s.center_hz + s.half_bw_hz >= fs / 2.0)
                throw ConfigError("bandpass exceeds Nyquist: stage/signal rate mismatch");
            const auto taps = design_kaiser_bandpass(s.center_hz / fs, s.half_bw_hz / fs,
                                                     s.transition_hz / fs, s.atten_db);
            SampledSignal y = SampledSignal::real(fir_filter(sig.re(), taps), fs);
            y.meta = sig.meta;
            y.meta.history.push_back("bandpass");
            return y;
        }
        SampledSignal operator()(const AmplifierStage& s) { return noisy_amplify(sig, s.model, seed); }
        SampledSignal operator()(const AwgnStage& s) { return add_awgn(sig, s.snr_db, seed); }
        SampledSignal operator()(const GainStage& s) {
            const double g = db_to_lin_amp(s.gain_db);
            if (sig.is_real()) {
                for (auto& v : sig.re()) v *= g;
            } else {
                for (auto& v : sig.cx()) v *= g;
            }
            sig.meta.history.push_back("gain");
            return sig;
        }
        SampledSignal operator()(const DcBlockStage&) {
            if (!sig.is_real()) throw InputError("dc_block expects a real signal");
            auto& x = sig.re();
            double mean = 0.0;
            for (double v : x) mean += v;
            mean /= static_cast<double>(x.size());
            for (auto& v : x) v -= mean;
            sig.meta.history.push_back("dc_block");
            return sig;
        }
        SampledSignal operator()(const ResampleStage& s) {
            const double ratio_up = s.rate_hz / sig.rate_hz();
            std::size_t L = 1, M = 1;
            // find a modest rational approximation of the rate change
            for (std::size_t den = 1; den <= 16384; ++den) {
                const double num = ratio_up * static_cast<double>(den);
                if (std::abs(num - std::round(num)) < 1e-9 && std::round(num) >= 1.0) {
                    L = static_cast<std::size_t>(std::round(num));
                    M = den;
                    break;
                }
                if (den == 16384) throw ConfigError("resample ratio not rational enough");
            }
            const auto taps = design_resampler_taps(L, M);
            SampledSignal y =
                SampledSignal::real(resample_rational(sig.re(), L, M, taps), s.rate_hz);
            y.meta = sig.meta;
            y.meta.history.push_back("resample");
            return y;
        }
        SampledSignal operator()(const BrickwallStage& s) {
            return brickwall_bandpass(sig, s.f_lo_hz, s.f_hi_hz);
        }
    };
    return std::visit(V{std::move(sig), seed}, stage);
}

}  // namespace detail

/// Apply the chain in order; per-stage output powers are recorded in the
/// signal metadata for the report.
inline SampledSignal run_chain(const SampledSignal& input, const ChannelChain& chain) {
    SampledSignal sig = input;
    sig.meta.stage_powers.push_back({"chain_input", sig.mean_power()});
    for (std::size_t i = 0; i < chain.stages.size(); ++i) {
        const auto& entry = chain.stages[i];
        if (entry.expect_input_rate_hz > 0.0 &&
            std::abs(entry.expect_input_rate_hz - sig.rate_hz()) > 1e-6) {
            throw ConfigError("stage " + stage_name(entry.op) + " expects rate " +
                              std::to_string(entry.expect_input_rate_hz) + ", got " +
                              std::to_string(sig.rate_hz()));
        }
        const std::uint64_t seed = derive_seed(chain.master_seed, i);
        sig = detail::apply_stage(std::move(sig), entry.op, seed);
        sig.meta.stage_powers.push_back({stage_name(entry.op), sig.mean_power()});
    }
    return sig;
}

}  // namespace rofso
