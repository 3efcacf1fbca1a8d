// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rofso/numerology.hpp"
#include "rofso/ofdm.hpp"
#include "rofso/passband.hpp"
#include "rofso/rx/costas.hpp"
#include "rofso/rx/demod.hpp"
#include "rofso/rx/equalize.hpp"
#include "rofso/rx/sync.hpp"
#include "rofso/signal.hpp"
#include "rofso/test_model.hpp"

namespace rofso {

enum class CarrierRecovery { Auto, Costas, NcoFallback };

inline std::string to_string(CarrierRecovery c) {
    switch (c) {
        case CarrierRecovery::Auto: return "auto";
        case CarrierRecovery::Costas: return "costas";
        case CarrierRecovery::NcoFallback: return "nco_fallback";
    }
    return "?";
}

struct RxConfig {
    CarrierRecovery carrier_recovery = CarrierRecovery::Auto;
    CostasConfig costas;
    SyncConfig sync;
    ChanEstConfig chanest;
    ZfConfig zf;
    double cfo_correct_min_hz = 1.0;  // ignore CFO estimates below this
};

struct RxResult {
    EqualizedGrid eq;
    GridMatrix raw_grid;
    SyncResult sync;
    std::vector<ChannelEstimate> estimates;
    std::string carrier_path;  // which carrier-recovery path produced the baseband
    bool costas_locked = false;
    std::vector<double> costas_trace_index;
    std::vector<double> costas_trace_freq_hz;
};

/// Full receive pipeline: carrier recovery/downconversion (unless the input
/// is already complex baseband), DMRS frame sync, optional CFO derotation,
/// CP removal + FFT, slot-averaged LS estimation, ZF equalization. The
/// Costas path is tried first in Auto mode; if its lock indicator stays
/// false the fixed-NCO fallback runs and the report records it.
inline RxResult rx_receive(const SampledSignal& input, const Numerology& num,
                           const CarrierConfig& carrier, const ResourceGrid& ref,
                           const TestModelSpec& tm, const RxConfig& cfg = {}) {
    RxResult res;

    SampledSignal bb;
    if (input.is_real()) {
        CostasConfig ccfg = cfg.costas;
        ccfg.nominal_carrier_hz = carrier.carrier_hz;
        ccfg.output_rate_hz = num.sample_rate_hz;

        bool use_costas = false;
        if (cfg.carrier_recovery == CarrierRecovery::Costas) {
            CostasResult cr = costas_downconvert(input, ccfg);  // throws on no-lock
            res.costas_locked = true;
            res.costas_trace_index = cr.trace_index;
            res.costas_trace_freq_hz = cr.trace_freq_hz;
            bb = std::move(cr.baseband);
            res.carrier_path = "costas";
            use_costas = true;
        } else if (cfg.carrier_recovery == CarrierRecovery::Auto) {
            // probe a short prefix; only commit to the full loop if it locks
            const std::size_t probe_len = std::min(
                input.size(),
                static_cast<std::size_t>(3.0 * ccfg.settle_time_s * input.rate_hz()) + 1);
            SampledSignal probe = SampledSignal::real(
                std::vector<double>(input.re().begin(), input.re().begin() + probe_len),
                input.rate_hz());
            CostasResult pr = costas_downconvert_try(probe, ccfg);
            if (pr.locked) {
                CostasResult cr = costas_downconvert_try(input, ccfg);
                res.costas_locked = cr.locked;
                res.costas_trace_index = cr.trace_index;
                res.costas_trace_freq_hz = cr.trace_freq_hz;
                if (cr.locked) {
                    bb = std::move(cr.baseband);
                    res.carrier_path = "costas";
                    use_costas = true;
                }
            }
        }
        if (!use_costas) {
            bb = nco_downconvert(input, carrier.carrier_hz, num.sample_rate_hz);
            res.carrier_path = "nco_fallback";
        }
    } else {
        if (std::abs(input.rate_hz() - num.sample_rate_hz) > 1e-6)
            throw ConfigError("complex input must already be at the baseband rate");
        bb = input;
        res.carrier_path = "baseband";
    }

    const auto tpl = ofdm_symbol_waveform(ref.reference, num, tm.dmrs.symbol_index);
    const std::size_t tpl_offset = ofdm_waveform_length(num, tm.dmrs.symbol_index);
    res.sync = time_synchronize(bb, num, tpl, tpl_offset, cfg.sync);

    if (std::abs(res.sync.cfo_hz) > cfg.cfo_correct_min_hz) {
        auto& x = bb.cx();
        const double w = -2.0 * kPi * res.sync.cfo_hz / bb.rate_hz();
        for (std::size_t n = 0; n < x.size(); ++n) {
            x[n] *= cplx{std::cos(w * static_cast<double>(n)), std::sin(w * static_cast<double>(n))};
        }
        res.sync = time_synchronize(bb, num, tpl, tpl_offset, cfg.sync);
    }

    res.raw_grid = ofdm_demodulate(bb, num, res.sync, ref.reference.n_symbols);
    res.estimates = estimate_channel_ls(res.raw_grid, ref, tm.dmrs, num.symbols_per_slot,
                                        num.fft_size, cfg.chanest);
    res.eq = zf_equalize(res.raw_grid, res.estimates, num.symbols_per_slot, cfg.zf);
    return res;
}

}  // namespace rofso
