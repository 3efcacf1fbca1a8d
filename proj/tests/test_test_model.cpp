// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "rofso/test_model.hpp"

using namespace rofso;

namespace {

double rb_mean_power(const ResourceGrid& g, std::size_t rb) {
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t sym = 0; sym < g.symbols.n_symbols; ++sym) {
        for (std::size_t sc = 12 * rb; sc < 12 * (rb + 1); ++sc) {
            acc += std::norm(g.symbols.at(sym, sc));
            ++n;
        }
    }
    return acc / static_cast<double>(n);
}

}  // namespace

TEST_CASE("TM1.1 grid: QPSK everywhere, equal RB powers") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(TestModelId::TM1_1, num);
    REQUIRE(tm.modulation == 4);
    const auto grid = build_test_model_grid(tm, num, 1);

    REQUIRE(grid.symbols.n_symbols == 280);
    REQUIRE(grid.symbols.n_subcarriers == 612);

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t sym = 0; sym < grid.symbols.n_symbols; ++sym) {
        for (std::size_t sc = 0; sc < grid.symbols.n_subcarriers; ++sc) {
            const cplx v = grid.symbols.at(sym, sc);
            REQUIRE(std::abs(std::abs(v.real()) - inv_sqrt2) < 1e-12);
            REQUIRE(std::abs(std::abs(v.imag()) - inv_sqrt2) < 1e-12);
        }
    }
    const double p0 = rb_mean_power(grid, 0);
    for (std::size_t rb = 1; rb < num.n_rb; ++rb) {
        REQUIRE(rb_mean_power(grid, rb) == Catch::Approx(p0).epsilon(1e-12));
    }
    REQUIRE(grid.mean_data_power() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("TM1.2 applies the configured per-RB offsets exactly") {
    const auto num = make_numerology(30e3, 20e6);
    auto tm = make_test_model(TestModelId::TM1_2, num);
    tm.power_pattern_db.assign(num.n_rb, -1.78);
    for (std::size_t rb = 0; rb < 20; ++rb) tm.power_pattern_db[rb] = 3.0;
    const auto grid = build_test_model_grid(tm, num, 1);

    // QPSK REs all have |s|^2 = 1 before scaling, so RB power equals the
    // configured offset exactly
    for (std::size_t rb = 0; rb < num.n_rb; ++rb) {
        const double want = db_to_lin_pow(tm.power_pattern_db[rb]);
        REQUIRE(rb_mean_power(grid, rb) == Catch::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("default TM1.2 pattern boosts 40% of RBs and conserves total power") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(TestModelId::TM1_2, num);
    REQUIRE(tm.power_pattern_db.size() == num.n_rb);
    std::size_t boosted = 0;
    for (double db : tm.power_pattern_db) boosted += (db == 3.0) ? 1 : 0;
    REQUIRE(boosted == 20);

    const auto grid = build_test_model_grid(tm, num, 1);
    REQUIRE(grid.mean_data_power() == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("identical spec and seed give bit-identical grids") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(TestModelId::TM3_1, num);
    const auto a = build_test_model_grid(tm, num, 1);
    const auto b = build_test_model_grid(tm, num, 1);
    REQUIRE(a.symbols.v == b.symbols.v);
    REQUIRE(a.roles == b.roles);
    REQUIRE(a.reference.v == b.reference.v);

    auto tm2 = tm;
    tm2.prbs_seed ^= 1;
    const auto c = build_test_model_grid(tm2, num, 1);
    REQUIRE(a.symbols.v != c.symbols.v);
}

TEST_CASE("DMRS layout: one symbol per slot, stride 2") {
    const auto num = make_numerology(30e3, 20e6);
    const auto tm = make_test_model(TestModelId::TM3_1a, num);
    const auto grid = build_test_model_grid(tm, num, 1);

    const std::size_t n_slots = 20;
    const std::size_t dmrs_per_symbol = 306;
    REQUIRE(grid.count_role(Role::Dmrs) == n_slots * dmrs_per_symbol);

    for (std::size_t slot = 0; slot < n_slots; ++slot) {
        const std::size_t sym = slot * 14 + tm.dmrs.symbol_index;
        for (std::size_t sc = 0; sc < 612; ++sc) {
            const Role want = (sc % 2 == 0) ? Role::Dmrs : Role::Data;
            REQUIRE(grid.role_at(sym, sc) == want);
        }
        // DMRS REs are QPSK pilots
        for (std::size_t sc = 0; sc < 612; sc += 2) {
            REQUIRE(std::abs(grid.symbols.at(sym, sc)) == Catch::Approx(1.0).margin(1e-12));
        }
    }

    // reference copy is exact
    REQUIRE(grid.reference.v == grid.symbols.v);
}

TEST_CASE("test model modulation assignments") {
    const auto num = make_numerology(30e3, 20e6);
    REQUIRE(make_test_model(TestModelId::TM1_1, num).modulation == 4);
    REQUIRE(make_test_model(TestModelId::TM1_2, num).modulation == 4);
    REQUIRE(make_test_model(TestModelId::TM3_1, num).modulation == 64);
    REQUIRE(make_test_model(TestModelId::TM3_1a, num).modulation == 256);
    for (TestModelId id :
         {TestModelId::TM1_1, TestModelId::TM3_1, TestModelId::TM3_1a}) {
        REQUIRE(make_test_model(id, num).power_pattern_db.empty());
    }
}

TEST_CASE("grid configuration errors") {
    const auto num = make_numerology(30e3, 20e6);
    auto tm = make_test_model(TestModelId::TM1_1, num);
    REQUIRE_THROWS_AS(build_test_model_grid(tm, num, 0), ConfigError);
    tm.power_pattern_db.assign(10, 0.0);  // wrong length
    REQUIRE_THROWS_AS(build_test_model_grid(tm, num, 1), ConfigError);
}
