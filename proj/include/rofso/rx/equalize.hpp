// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "rofso/numerology.hpp"
#include "rofso/signal.hpp"
#include "rofso/test_model.hpp"

namespace rofso {

/// Complex gain per occupied subcarrier; `valid` masks subcarriers the
/// equalizer must not touch.
struct ChannelEstimate {
    std::vector<cplx> gain;
    std::vector<std::uint8_t> valid;

    std::size_t n_valid() const {
        std::size_t n = 0;
        for (auto v : valid) n += v ? 1 : 0;
        return n;
    }
};

struct ChanEstConfig {
    bool average_slots = true;  // static channel: average LS pilots across slots
};

namespace detail {

// LS pilot estimates -> full-band estimate. The phase slope across pilots is
// collapsed to the nearest integer sample delay and removed before the
// complex-linear interpolation, then restored, so large pure delays
// interpolate exactly.
inline ChannelEstimate interpolate_pilots(const std::vector<cplx>& pilot_gain,
                                          const std::vector<std::size_t>& pilot_sc,
                                          std::size_t n_sc, std::size_t fft_size) {
    ChannelEstimate est;
    est.gain.assign(n_sc, cplx{0.0, 0.0});
    est.valid.assign(n_sc, 1);

    // average phase step between adjacent pilots -> integer delay estimate
    cplx rot{0.0, 0.0};
    for (std::size_t i = 1; i < pilot_sc.size(); ++i) {
        rot += pilot_gain[i] * std::conj(pilot_gain[i - 1]);
    }
    double d_int = 0.0;
    if (std::abs(rot) > 0.0 && pilot_sc.size() >= 2) {
        const double stride = static_cast<double>(pilot_sc[1] - pilot_sc[0]);
        const double phase_per_sc = std::arg(rot) / stride;
        d_int = std::round(-phase_per_sc * static_cast<double>(fft_size) / (2.0 * kPi));
    }
    auto ramp = [&](std::size_t sc) {
        const double k = static_cast<double>(static_cast<std::ptrdiff_t>(sc) -
                                             static_cast<std::ptrdiff_t>(n_sc / 2));
        const double a = -2.0 * kPi * k * d_int / static_cast<double>(fft_size);
        return cplx{std::cos(a), std::sin(a)};
    };

    // de-rotated pilot values
    std::vector<cplx> flat(pilot_gain.size());
    for (std::size_t i = 0; i < pilot_gain.size(); ++i)
        flat[i] = pilot_gain[i] * std::conj(ramp(pilot_sc[i]));

    for (std::size_t sc = 0; sc < n_sc; ++sc) {
        cplx v;
        if (sc <= pilot_sc.front()) {
            // linear extrapolation off the first two pilots
            const double t = (static_cast<double>(sc) - static_cast<double>(pilot_sc[0])) /
                             static_cast<double>(pilot_sc[1] - pilot_sc[0]);
            v = flat[0] + t * (flat[1] - flat[0]);
        } else if (sc >= pilot_sc.back()) {
            const std::size_t m = pilot_sc.size() - 1;
            const double t = (static_cast<double>(sc) - static_cast<double>(pilot_sc[m])) /
                             static_cast<double>(pilot_sc[m] - pilot_sc[m - 1]);
            v = flat[m] + t * (flat[m] - flat[m - 1]);
        } else {
            const auto it = std::upper_bound(pilot_sc.begin(), pilot_sc.end(), sc);
            const std::size_t hi = static_cast<std::size_t>(it - pilot_sc.begin());
            const std::size_t lo = hi - 1;
            const double t = (static_cast<double>(sc) - static_cast<double>(pilot_sc[lo])) /
                             static_cast<double>(pilot_sc[hi] - pilot_sc[lo]);
            v = flat[lo] + t * (flat[hi] - flat[lo]);
        }
        est.gain[sc] = v * ramp(sc);
    }
    return est;
}

}  // namespace detail

/// Least-squares channel estimate from the DMRS REs. Returns one estimate
/// per slot, or a single slot-averaged estimate (default; the simulated
/// channel is time-invariant).
inline std::vector<ChannelEstimate> estimate_channel_ls(const GridMatrix& rx,
                                                        const ResourceGrid& ref,
                                                        const DmrsConfig& dmrs,
                                                        std::size_t symbols_per_slot,
                                                        std::size_t fft_size,
                                                        const ChanEstConfig& cfg = {}) {
    if (rx.n_symbols != ref.reference.n_symbols || rx.n_subcarriers != ref.reference.n_subcarriers)
        throw InputError("received and reference grids are not congruent");
    const std::size_t n_sc = rx.n_subcarriers;
    const std::size_t n_slots = rx.n_symbols / symbols_per_slot;
    if (n_slots == 0) throw MeasurementError("no complete slot to estimate from");

    std::vector<std::size_t> pilot_sc;
    for (std::size_t sc = 0; sc < n_sc; sc += dmrs.stride) pilot_sc.push_back(sc);
    if (pilot_sc.size() < 2) throw MeasurementError("missing DMRS: not enough pilot subcarriers");

    auto slot_pilots = [&](std::size_t slot) {
        const std::size_t sym = slot * symbols_per_slot + dmrs.symbol_index;
        std::vector<cplx> g(pilot_sc.size());
        for (std::size_t i = 0; i < pilot_sc.size(); ++i) {
            const cplx x = ref.reference.at(sym, pilot_sc[i]);
            if (std::norm(x) == 0.0 || ref.role_at(sym, pilot_sc[i]) != Role::Dmrs)
                throw MeasurementError("missing DMRS at the configured position");
            g[i] = rx.at(sym, pilot_sc[i]) / x;
        }
        return g;
    };

    std::vector<ChannelEstimate> out;
    if (cfg.average_slots) {
        std::vector<cplx> acc(pilot_sc.size(), cplx{0.0, 0.0});
        for (std::size_t slot = 0; slot < n_slots; ++slot) {
            const auto g = slot_pilots(slot);
            for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
        }
        for (auto& v : acc) v /= static_cast<double>(n_slots);
        out.push_back(detail::interpolate_pilots(acc, pilot_sc, n_sc, fft_size));
    } else {
        out.reserve(n_slots);
        for (std::size_t slot = 0; slot < n_slots; ++slot)
            out.push_back(detail::interpolate_pilots(slot_pilots(slot), pilot_sc, n_sc, fft_size));
    }
    return out;
}

struct ZfConfig {
    double gain_floor_rel = 1e-6;  // mask |H| below this fraction of the median
};

struct EqualizedGrid {
    GridMatrix grid;
    std::vector<std::uint8_t> re_valid;  // same layout as grid.v
    std::size_t n_masked_subcarriers = 0;
};

/// Zero-forcing equalizer: X_hat[k] = Y[k] / H_hat[k] on unmasked
/// subcarriers. Subcarriers whose |H| falls below the floor are masked and
/// excluded from downstream EVM.
inline EqualizedGrid zf_equalize(const GridMatrix& rx, const std::vector<ChannelEstimate>& ests,
                                 std::size_t symbols_per_slot, const ZfConfig& cfg = {}) {
    if (ests.empty()) throw MeasurementError("no channel estimate");
    const std::size_t n_sc = rx.n_subcarriers;

    EqualizedGrid out;
    out.grid = GridMatrix(rx.n_symbols, n_sc);
    out.re_valid.assign(rx.n_symbols * n_sc, 1);

    // per-estimate magnitude floor relative to its median gain
    std::vector<std::vector<std::uint8_t>> sc_ok(ests.size());
    std::vector<std::size_t> masked_total(ests.size(), 0);
    for (std::size_t e = 0; e < ests.size(); ++e) {
        const auto& est = ests[e];
        std::vector<double> mags;
        mags.reserve(n_sc);
        for (std::size_t sc = 0; sc < n_sc; ++sc) {
            if (est.valid[sc]) mags.push_back(std::abs(est.gain[sc]));
        }
        if (mags.empty()) throw MeasurementError("all subcarriers masked in the channel estimate");
        std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
        const double floor_abs = cfg.gain_floor_rel * mags[mags.size() / 2];
        sc_ok[e].assign(n_sc, 0);
        for (std::size_t sc = 0; sc < n_sc; ++sc) {
            const bool ok = est.valid[sc] && std::abs(est.gain[sc]) > floor_abs &&
                            std::abs(est.gain[sc]) > 0.0;
            sc_ok[e][sc] = ok ? 1 : 0;
            if (!ok) ++masked_total[e];
        }
        if (masked_total[e] == n_sc)
            throw MeasurementError("all subcarriers masked by the gain floor");
    }

    for (std::size_t sym = 0; sym < rx.n_symbols; ++sym) {
        const std::size_t slot = sym / symbols_per_slot;
        const std::size_t e = (ests.size() == 1) ? 0 : std::min(slot, ests.size() - 1);
        const auto& est = ests[e];
        for (std::size_t sc = 0; sc < n_sc; ++sc) {
            if (sc_ok[e][sc]) {
                out.grid.at(sym, sc) = rx.at(sym, sc) / est.gain[sc];
            } else {
                out.grid.at(sym, sc) = rx.at(sym, sc);
                out.re_valid[sym * n_sc + sc] = 0;
            }
        }
    }
    std::size_t max_masked = 0;
    for (auto m : masked_total) max_masked = std::max(max_masked, m);
    out.n_masked_subcarriers = max_masked;
    return out;
}

}  // namespace rofso
