// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rofso/errors.hpp"
#include "rofso/modulation.hpp"
#include "rofso/numerology.hpp"
#include "rofso/signal.hpp"

namespace rofso {

enum class TestModelId { TM1_1, TM1_2, TM3_1, TM3_1a };

inline std::string to_string(TestModelId id) {
    switch (id) {
        case TestModelId::TM1_1: return "TM1.1";
        case TestModelId::TM1_2: return "TM1.2";
        case TestModelId::TM3_1: return "TM3.1";
        case TestModelId::TM3_1a: return "TM3.1a";
    }
    return "?";
}

inline TestModelId test_model_from_string(const std::string& s) {
    if (s == "TM1.1" || s == "tm1.1") return TestModelId::TM1_1;
    if (s == "TM1.2" || s == "tm1.2") return TestModelId::TM1_2;
    if (s == "TM3.1" || s == "tm3.1") return TestModelId::TM3_1;
    if (s == "TM3.1a" || s == "tm3.1a") return TestModelId::TM3_1a;
    throw ConfigError("unknown test model: " + s);
}

struct DmrsConfig {
    std::size_t symbol_index = 2;  // within each slot
    std::size_t stride = 2;        // subcarrier stride on the DMRS symbol
    std::uint32_t seed = 0x35c4a7;
};

struct TestModelSpec {
    TestModelId id = TestModelId::TM1_1;
    unsigned modulation = 4;  // QAM order of the data REs
    std::vector<double> power_pattern_db;  // per-RB offsets; empty = all zero
    std::uint32_t prbs_seed = 0x6a41b3;
    DmrsConfig dmrs;

    void validate(const Numerology& num) const {
        if (!power_pattern_db.empty() && power_pattern_db.size() != num.n_rb)
            throw ConfigError("power pattern length must equal n_rb");
        if (dmrs.symbol_index >= num.symbols_per_slot)
            throw ConfigError("DMRS symbol index out of range");
        if (dmrs.stride == 0 || dmrs.stride > num.n_subcarriers())
            throw ConfigError("DMRS stride out of range");
    }
};

/// Standard test-model configurations. TM1.x carry QPSK on every subcarrier,
/// TM3.1/TM3.1a carry 64-/256-QAM. TM1.2 boosts the first 40% of RBs by 3 dB
/// and deboosts the rest so total power matches TM1.1.
inline TestModelSpec make_test_model(TestModelId id, const Numerology& num) {
    TestModelSpec tm;
    tm.id = id;
    switch (id) {
        case TestModelId::TM1_1: tm.modulation = 4; break;
        case TestModelId::TM1_2: tm.modulation = 4; break;
        case TestModelId::TM3_1: tm.modulation = 64; break;
        case TestModelId::TM3_1a: tm.modulation = 256; break;
    }
    if (id == TestModelId::TM1_2) {
        const std::size_t n_boost =
            static_cast<std::size_t>(0.4 * static_cast<double>(num.n_rb) + 0.5);
        const double boost_lin = db_to_lin_pow(3.0);
        const double rest = (static_cast<double>(num.n_rb) -
                             static_cast<double>(n_boost) * boost_lin) /
                            static_cast<double>(num.n_rb - n_boost);
        const double deboost_db = lin_pow_to_db(rest);
        tm.power_pattern_db.assign(num.n_rb, deboost_db);
        for (std::size_t i = 0; i < n_boost; ++i) tm.power_pattern_db[i] = 3.0;
    }
    return tm;
}

enum class Role : std::uint8_t { Data = 0, Dmrs = 1 };

struct GridMatrix {
    std::size_t n_symbols = 0;
    std::size_t n_subcarriers = 0;
    std::vector<cplx> v;

    GridMatrix() = default;
    GridMatrix(std::size_t n_sym, std::size_t n_sc)
        : n_symbols(n_sym), n_subcarriers(n_sc), v(n_sym * n_sc) {}

    cplx& at(std::size_t sym, std::size_t sc) { return v[sym * n_subcarriers + sc]; }
    const cplx& at(std::size_t sym, std::size_t sc) const { return v[sym * n_subcarriers + sc]; }
};

/// Transmit resource grid: modulation symbols, per-RE roles, and an exact
/// reference copy retained for EVM.
struct ResourceGrid {
    GridMatrix symbols;
    std::vector<Role> roles;  // same layout as symbols.v
    GridMatrix reference;

    Role role_at(std::size_t sym, std::size_t sc) const {
        return roles[sym * symbols.n_subcarriers + sc];
    }

    std::size_t count_role(Role r) const {
        std::size_t n = 0;
        for (Role x : roles) n += (x == r) ? 1 : 0;
        return n;
    }

    double mean_data_power() const {
        double acc = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < roles.size(); ++i) {
            if (roles[i] == Role::Data) {
                acc += std::norm(symbols.v[i]);
                ++n;
            }
        }
        return n ? acc / static_cast<double>(n) : 0.0;
    }
};

/// Fill a test-model grid: PRBS-driven constellation symbols on data REs, a
/// seeded QPSK sequence on the DMRS REs (one DMRS symbol per slot), per-RB
/// amplitude scaling from the power pattern.
inline ResourceGrid build_test_model_grid(const TestModelSpec& tm, const Numerology& num,
                                          std::size_t n_frames) {
    if (n_frames < 1) throw ConfigError("n_frames must be >= 1");
    tm.validate(num);

    const std::size_t n_sc = num.n_subcarriers();
    const std::size_t n_slots = 10 * num.slots_per_subframe() * n_frames;
    const std::size_t n_sym = n_slots * num.symbols_per_slot;

    ResourceGrid grid;
    grid.symbols = GridMatrix(n_sym, n_sc);
    grid.roles.assign(n_sym * n_sc, Role::Data);

    // DMRS REs first so the data scan knows what to skip.
    const std::size_t dmrs_per_symbol = (n_sc + tm.dmrs.stride - 1) / tm.dmrs.stride;
    const auto dmrs_seq = qpsk_sequence(dmrs_per_symbol * n_slots, tm.dmrs.seed);
    for (std::size_t slot = 0; slot < n_slots; ++slot) {
        const std::size_t sym = slot * num.symbols_per_slot + tm.dmrs.symbol_index;
        for (std::size_t j = 0, sc = 0; sc < n_sc; sc += tm.dmrs.stride, ++j) {
            grid.symbols.at(sym, sc) = dmrs_seq[slot * dmrs_per_symbol + j];
            grid.roles[sym * n_sc + sc] = Role::Dmrs;
        }
    }

    // Data REs in (symbol, subcarrier) scan order from one PRBS stream.
    const unsigned bps = qam_bits_per_symbol(tm.modulation);
    Prbs23 prbs(tm.prbs_seed);
    std::vector<std::uint8_t> bits(bps);
    for (std::size_t sym = 0; sym < n_sym; ++sym) {
        for (std::size_t sc = 0; sc < n_sc; ++sc) {
            if (grid.roles[sym * n_sc + sc] != Role::Data) continue;
            for (auto& b : bits) b = static_cast<std::uint8_t>(prbs.next_bit());
            grid.symbols.at(sym, sc) = qam_point(bits.data(), tm.modulation);
        }
    }

    if (!tm.power_pattern_db.empty()) {
        for (std::size_t rb = 0; rb < num.n_rb; ++rb) {
            const double a = db_to_lin_amp(tm.power_pattern_db[rb]);
            for (std::size_t sym = 0; sym < n_sym; ++sym)
                for (std::size_t sc = 12 * rb; sc < 12 * (rb + 1); ++sc)
                    grid.symbols.at(sym, sc) *= a;
        }
    }

    grid.reference = grid.symbols;
    return grid;
}

}  // namespace rofso
