// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>

#include "rofso/measure/psd.hpp"
#include "rofso/numerology.hpp"
#include "rofso/signal.hpp"

namespace rofso {

/// ACLR above this is reported as "capped": the leakage is below any
/// meaningful numerical floor.
constexpr double kAclrCapDb = 80.0;

struct AclrResult {
    double assigned_power = 0.0;
    double lower_power = 0.0;
    double upper_power = 0.0;
    double aclr_lower_db = 0.0;
    double aclr_upper_db = 0.0;
    bool capped_lower = false;
    bool capped_upper = false;
    double integration_bw_hz = 0.0;
    double channel_spacing_hz = 0.0;

    bool pass(double aclr_min_db) const {
        return aclr_lower_db >= aclr_min_db && aclr_upper_db >= aclr_min_db;
    }
};

/// Adjacent channel leakage ratio: power in the assigned channel (carrier
/// +/- half the occupied bandwidth) over the power in the same integration
/// width centered one channel spacing away on either side. The Welch
/// segment is sized so the bin spacing stays at or below 100 kHz.
inline AclrResult measure_aclr(const SampledSignal& sig, const CarrierConfig& carrier,
                               double channel_spacing_hz = 20e6) {
    if (!sig.is_real()) throw InputError("ACLR is measured on the real passband signal");
    const double bw = carrier.occupied_bw_hz;
    const double fc = carrier.carrier_hz;
    if (sig.rate_hz() / 2.0 < fc + 1.5 * channel_spacing_hz)
        throw MeasurementError("signal does not span carrier + 1.5x channel spacing");
    if (fc - 1.5 * channel_spacing_hz < 0.0)
        throw MeasurementError("carrier too close to DC for adjacent-channel integration");

    std::size_t seg = next_pow2(static_cast<std::size_t>(sig.rate_hz() / 100e3));
    seg = std::max<std::size_t>(seg, 4096);
    while (seg > 4096 && seg > sig.size()) seg /= 2;  // degrade resolution before failing
    const PsdEstimate psd = welch_psd(sig, seg);

    AclrResult r;
    r.integration_bw_hz = bw;
    r.channel_spacing_hz = channel_spacing_hz;
    r.assigned_power = psd.band_power(fc - bw / 2.0, fc + bw / 2.0);
    r.lower_power = psd.band_power(fc - channel_spacing_hz - bw / 2.0,
                                   fc - channel_spacing_hz + bw / 2.0);
    r.upper_power = psd.band_power(fc + channel_spacing_hz - bw / 2.0,
                                   fc + channel_spacing_hz + bw / 2.0);
    if (r.assigned_power <= 0.0) throw MeasurementError("no power in the assigned channel");

    auto ratio_db = [&](double adj, bool& capped) {
        double v = (adj > 0.0) ? lin_pow_to_db(r.assigned_power / adj) : kAclrCapDb + 1.0;
        capped = v > kAclrCapDb;
        return capped ? kAclrCapDb : v;
    };
    r.aclr_lower_db = ratio_db(r.lower_power, r.capped_lower);
    r.aclr_upper_db = ratio_db(r.upper_power, r.capped_upper);
    return r;
}

}  // namespace rofso
