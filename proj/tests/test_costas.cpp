// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "rofso/ofdm.hpp"
#include "rofso/rx/costas.hpp"
#include "rofso/test_model.hpp"

using namespace rofso;

namespace {

// scaled-down loop setup so unit tests stay fast; the acceptance suite runs
// the full-rate version
CostasConfig small_cfg() {
    CostasConfig cfg;
    cfg.nominal_carrier_hz = 2.5e6;
    cfg.output_rate_hz = 2e6;
    cfg.loop_bandwidth_hz = 5e3;
    cfg.prefilter_bw_hz = 50e3;
    cfg.settle_time_s = 5e-3;
    return cfg;
}

SampledSignal tone(double freq_hz, double phase_rad, double fs, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::cos(2.0 * kPi * freq_hz * static_cast<double>(i) / fs + phase_rad);
    return SampledSignal::real(std::move(x), fs);
}

}  // namespace

TEST_CASE("costas loop pulls in a 1 kHz offset") {
    const auto cfg = small_cfg();
    const double fs = 10e6;
    const auto sig = tone(cfg.nominal_carrier_hz + 1e3, 0.4, fs, 100000);  // 10 ms

    const auto res = costas_downconvert(sig, cfg);
    REQUIRE(res.locked);
    REQUIRE(std::abs(res.final_freq_hz - (cfg.nominal_carrier_hz + 1e3)) < 10.0);
    REQUIRE(res.baseband.rate_hz() == Catch::Approx(2e6));
    REQUIRE_FALSE(res.trace_freq_hz.empty());
}

TEST_CASE("costas loop absorbs a static 30 degree phase offset") {
    auto cfg = small_cfg();
    const double fs = 10e6;
    const double phi = 30.0 * kPi / 180.0;
    const auto sig = tone(cfg.nominal_carrier_hz, phi, fs, 100000);

    const auto res = costas_downconvert(sig, cfg);
    REQUIRE(res.locked);
    // residual phase modulo the detector's pi ambiguity
    const double theta = res.trace_phase_rad.back();
    double resid = std::fmod(std::abs(theta - phi), kPi);
    resid = std::min(resid, kPi - resid);
    REQUIRE(resid < 1.0 * kPi / 180.0);
    // frequency did not walk away
    REQUIRE(std::abs(res.final_freq_hz - cfg.nominal_carrier_hz) < 5.0);
}

TEST_CASE("costas NCO frequency settles without limit cycles") {
    const auto cfg = small_cfg();
    const double fs = 10e6;
    const auto sig = tone(cfg.nominal_carrier_hz + 500.0, 0.0, fs, 200000);  // 20 ms

    const auto res = costas_downconvert(sig, cfg);
    REQUIRE(res.locked);
    // after settle the trace envelope shrinks monotonically toward the target
    const double target = cfg.nominal_carrier_hz + 500.0;
    const std::size_t half = res.trace_freq_hz.size() / 2;
    double max_late = 0.0;
    for (std::size_t i = half; i < res.trace_freq_hz.size(); ++i)
        max_late = std::max(max_late, std::abs(res.trace_freq_hz[i] - target));
    REQUIRE(max_late < 1.0);  // no residual oscillation above 1 Hz
}

TEST_CASE("zero input raises a no-lock error") {
    const auto cfg = small_cfg();
    auto sig = SampledSignal::real(std::vector<double>(100000, 0.0), 10e6);
    REQUIRE_THROWS_AS(costas_downconvert(sig, cfg), LockError);
}

TEST_CASE("modulated OFDM passband does not satisfy the lock indicator") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(TestModelId::TM1_1, num);
    const auto grid = build_test_model_grid(tm, num, 1);

    GridMatrix slice(28, num.n_subcarriers());
    for (std::size_t s = 0; s < 28; ++s)
        for (std::size_t k = 0; k < slice.n_subcarriers; ++k)
            slice.at(s, k) = grid.symbols.at(s, k);
    const auto bb = ofdm_modulate(slice, num, 64);

    CarrierConfig carrier;
    carrier.carrier_hz = 40e6;
    carrier.passband_rate_hz = 8.0 * num.sample_rate_hz;
    carrier.occupied_bw_hz = num.occupied_bw_hz();
    const auto pb = upconvert_to_passband(bb, carrier);

    CostasConfig cfg;
    cfg.nominal_carrier_hz = carrier.carrier_hz;
    cfg.output_rate_hz = num.sample_rate_hz;
    cfg.loop_bandwidth_hz = 500.0;
    cfg.settle_time_s = 0.4e-3;
    const auto res = costas_downconvert_try(pb, cfg);
    REQUIRE_FALSE(res.locked);
    REQUIRE_THROWS_AS(costas_downconvert(pb, cfg), LockError);
}
