// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "rofso/measure/evm.hpp"
#include "rofso/rng.hpp"
#include "rofso/test_model.hpp"

using namespace rofso;

namespace {

ResourceGrid small_grid(TestModelId id, std::size_t n_slots = 2) {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(id, num);
    const auto full = build_test_model_grid(tm, num, 1);
    const std::size_t n_sym = n_slots * num.symbols_per_slot;
    ResourceGrid g;
    g.symbols = GridMatrix(n_sym, num.n_subcarriers());
    g.roles.assign(n_sym * num.n_subcarriers(), Role::Data);
    for (std::size_t s = 0; s < n_sym; ++s)
        for (std::size_t k = 0; k < num.n_subcarriers(); ++k) {
            g.symbols.at(s, k) = full.symbols.at(s, k);
            g.roles[s * num.n_subcarriers() + k] = full.roles[s * num.n_subcarriers() + k];
        }
    g.reference = g.symbols;
    return g;
}

}  // namespace

TEST_CASE("exact grid measures zero EVM") {
    const auto g = small_grid(TestModelId::TM3_1);
    const auto r = measure_evm(g.symbols, g, 64);
    REQUIRE(r.rms_pct == 0.0);
    REQUIRE(r.per_subcarrier_pct.size() == 612);
    REQUIRE(r.per_modulation_pct.at(64) == 0.0);
}

TEST_CASE("uniform 1.1x scaling measures exactly 10%") {
    const auto g = small_grid(TestModelId::TM1_1);
    GridMatrix eq = g.symbols;
    for (auto& v : eq.v) v *= 1.1;
    const auto r = measure_evm(eq, g);
    REQUIRE(r.rms_pct == Catch::Approx(10.0).epsilon(1e-9));
    for (double v : r.per_subcarrier_pct) REQUIRE(v == Catch::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("EVM at 30 dB grid SNR is 3.16% over 1e5 REs") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(TestModelId::TM3_1a, num);
    const auto g = build_test_model_grid(tm, num, 1);  // 171k REs

    Rng rng(17);
    const double sigma = std::sqrt(1e-3);
    GridMatrix eq = g.symbols;
    for (auto& v : eq.v) v += sigma * rng.gauss_cplx();
    const auto r = measure_evm(eq, g, 256);
    REQUIRE(r.n_res >= 100000);
    REQUIRE(r.rms_pct == Catch::Approx(100.0 * std::pow(10.0, -30.0 / 20.0)).margin(0.2));
}

TEST_CASE("DMRS REs are excluded from EVM") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(TestModelId::TM1_1, num);
    const auto g = build_test_model_grid(tm, num, 1);

    GridMatrix eq = g.symbols;
    for (std::size_t sym = 0; sym < eq.n_symbols; ++sym)
        for (std::size_t sc = 0; sc < eq.n_subcarriers; ++sc)
            if (g.role_at(sym, sc) == Role::Dmrs) eq.at(sym, sc) += cplx{10.0, 10.0};
    const auto r = measure_evm(eq, g);
    REQUIRE(r.rms_pct == 0.0);
}

TEST_CASE("masked REs are excluded when a validity mask is given") {
    const auto g = small_grid(TestModelId::TM1_1);
    GridMatrix eq = g.symbols;
    std::vector<std::uint8_t> mask(eq.v.size(), 1);
    // wreck one subcarrier and mask it out
    for (std::size_t sym = 0; sym < eq.n_symbols; ++sym) {
        eq.at(sym, 77) += cplx{5.0, 0.0};
        mask[sym * eq.n_subcarriers + 77] = 0;
    }
    const auto r = measure_evm(eq, g, 0, &mask);
    REQUIRE(r.rms_pct == 0.0);
}

TEST_CASE("zero reference power is an error") {
    ResourceGrid g;
    g.symbols = GridMatrix(14, 612);
    g.reference = g.symbols;
    g.roles.assign(14 * 612, Role::Data);
    REQUIRE_THROWS_AS(measure_evm(g.symbols, g), InputError);
}

TEST_CASE("added noise never lowers EVM") {
    const auto g = small_grid(TestModelId::TM3_1);
    Rng base(23);
    GridMatrix eq = g.symbols;
    for (auto& v : eq.v) v += 0.01 * base.gauss_cplx();
    const double evm0 = measure_evm(eq, g).rms_pct;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        GridMatrix noisier = eq;
        for (auto& v : noisier.v) v += 0.02 * rng.gauss_cplx();
        REQUIRE(measure_evm(noisier, g).rms_pct >= evm0);
    }
}

TEST_CASE("DC-subcarrier leak elevates its per-subcarrier EVM") {
    const auto g = small_grid(TestModelId::TM3_1);
    GridMatrix eq = g.symbols;
    const std::size_t dc = eq.n_subcarriers / 2;
    for (std::size_t sym = 0; sym < eq.n_symbols; ++sym) eq.at(sym, dc) += cplx{0.08, 0.03};
    const auto r = measure_evm(eq, g);
    std::vector<double> sorted = r.per_subcarrier_pct;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    REQUIRE(r.per_subcarrier_pct[dc] > median);
    REQUIRE(r.per_subcarrier_pct[dc] > 5.0);
}

TEST_CASE("verdicts: TM1.1 ACLR pass with margins") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(TestModelId::TM1_1, num);
    AclrResult aclr;
    aclr.aclr_lower_db = 45.0;
    aclr.aclr_upper_db = 46.1;
    aclr.assigned_power = 1.0;

    const auto verdicts = evaluate_limits(aclr, std::nullopt, tm, Limits{});
    REQUIRE(verdicts.size() == 2);
    REQUIRE(verdicts[0].pass);
    REQUIRE(verdicts[0].margin == Catch::Approx(0.8).margin(1e-12));
    REQUIRE(verdicts[1].pass);
    REQUIRE(verdicts[1].margin == Catch::Approx(1.9).margin(1e-12));
}

TEST_CASE("verdicts: TM3.1 at 8.5% passes conformance but fails minimum") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(TestModelId::TM3_1, num);
    EvmResult evm;
    evm.rms_pct = 8.5;

    const auto verdicts = evaluate_limits(std::nullopt, evm, tm, Limits{});
    REQUIRE(verdicts.size() == 2);
    REQUIRE(verdicts[0].tier == "conformance");
    REQUIRE(verdicts[0].limit == 9.0);
    REQUIRE(verdicts[0].pass);
    REQUIRE(verdicts[1].tier == "minimum");
    REQUIRE(verdicts[1].limit == 8.0);
    REQUIRE_FALSE(verdicts[1].pass);
}

TEST_CASE("missing required measurement is an incomplete-test error") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm31a = make_test_model(TestModelId::TM3_1a, num);
    REQUIRE_THROWS_AS(evaluate_limits(std::nullopt, std::nullopt, tm31a, Limits{}),
                      MeasurementError);
    const auto tm11 = make_test_model(TestModelId::TM1_1, num);
    REQUIRE_THROWS_AS(evaluate_limits(std::nullopt, std::nullopt, tm11, Limits{}),
                      MeasurementError);
}

TEST_CASE("limits validate their tier ordering") {
    Limits bad;
    bad.evm_max_pct[64] = {7.0, 8.0};  // conformance below minimum
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    Limits bad2;
    bad2.aclr_min_db = -1.0;
    REQUIRE_THROWS_AS(bad2.validate(), ConfigError);
}
