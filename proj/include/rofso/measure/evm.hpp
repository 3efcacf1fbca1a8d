// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rofso/measure/aclr.hpp"
#include "rofso/signal.hpp"
#include "rofso/test_model.hpp"

namespace rofso {

struct EvmResult {
    double rms_pct = 0.0;
    std::vector<double> per_subcarrier_pct;  // length 12*n_rb
    std::map<unsigned, double> per_modulation_pct;
    std::size_t n_res = 0;  // data REs measured
};

/// RMS EVM over PDSCH data REs against the known transmitted grid, in
/// percent. DMRS REs are excluded, as are REs the equalizer masked (when a
/// validity mask is supplied). The per-subcarrier vector applies the same
/// ratio restricted to each subcarrier.
inline EvmResult measure_evm(const GridMatrix& eq, const ResourceGrid& ref,
                             unsigned modulation_order = 0,
                             const std::vector<std::uint8_t>* re_valid = nullptr) {
    const GridMatrix& r = ref.reference;
    if (eq.n_symbols != r.n_symbols || eq.n_subcarriers != r.n_subcarriers)
        throw InputError("equalized and reference grids are not congruent");
    if (re_valid && re_valid->size() != r.v.size())
        throw InputError("validity mask does not match the grid");

    const std::size_t n_sc = r.n_subcarriers;
    std::vector<double> err_sc(n_sc, 0.0), pow_sc(n_sc, 0.0);
    double err = 0.0, pow = 0.0;
    std::size_t n_res = 0;
    for (std::size_t sym = 0; sym < r.n_symbols; ++sym) {
        for (std::size_t sc = 0; sc < n_sc; ++sc) {
            if (ref.role_at(sym, sc) != Role::Data) continue;
            if (re_valid && !(*re_valid)[sym * n_sc + sc]) continue;
            const double e = std::norm(eq.at(sym, sc) - r.at(sym, sc));
            const double p = std::norm(r.at(sym, sc));
            err += e;
            pow += p;
            err_sc[sc] += e;
            pow_sc[sc] += p;
            ++n_res;
        }
    }
    if (pow <= 0.0) throw InputError("reference grid has zero data power");

    EvmResult res;
    res.n_res = n_res;
    res.rms_pct = 100.0 * std::sqrt(err / pow);
    res.per_subcarrier_pct.resize(n_sc, 0.0);
    for (std::size_t sc = 0; sc < n_sc; ++sc) {
        if (pow_sc[sc] > 0.0) res.per_subcarrier_pct[sc] = 100.0 * std::sqrt(err_sc[sc] / pow_sc[sc]);
    }
    if (modulation_order != 0) res.per_modulation_pct[modulation_order] = res.rms_pct;
    return res;
}

struct EvmLimitTier {
    double conformance_pct = 0.0;  // conformance-test limit (includes test tolerance)
    double minimum_pct = 0.0;      // minimum requirement
};

struct Limits {
    double aclr_min_db = 44.2;
    std::map<unsigned, EvmLimitTier> evm_max_pct = {
        {4, {18.5, 17.5}},
        {64, {9.0, 8.0}},
        {256, {4.5, 3.5}},
    };

    void validate() const {
        if (aclr_min_db <= 0.0) throw ConfigError("aclr_min_db must be positive");
        for (const auto& [order, tier] : evm_max_pct) {
            if (tier.conformance_pct < tier.minimum_pct)
                throw ConfigError("EVM conformance limit below minimum requirement");
        }
    }
};

struct Verdict {
    std::string test;      // e.g. "aclr_lower", "evm_conformance"
    std::string tier;      // "conformance" or "minimum"
    double measured = 0.0;
    double limit = 0.0;
    double margin = 0.0;  // positive = pass with room
    bool pass = false;
};

/// Evaluate measurements against both limit tiers. TM1.x requires an ACLR
/// measurement, TM3.x requires EVM; whatever else is present is evaluated
/// and reported too.
inline std::vector<Verdict> evaluate_limits(const std::optional<AclrResult>& aclr,
                                            const std::optional<EvmResult>& evm,
                                            const TestModelSpec& tm, const Limits& limits) {
    limits.validate();
    const bool is_tm1 = tm.id == TestModelId::TM1_1 || tm.id == TestModelId::TM1_2;
    if (is_tm1 && !aclr)
        throw MeasurementError("ACLR measurement required for " + to_string(tm.id));
    if (!is_tm1 && !evm)
        throw MeasurementError("EVM measurement required for " + to_string(tm.id));

    std::vector<Verdict> out;
    if (aclr) {
        for (const auto& [name, value] : {std::pair<std::string, double>{"aclr_lower", aclr->aclr_lower_db},
                                          {"aclr_upper", aclr->aclr_upper_db}}) {
            Verdict v;
            v.test = name;
            v.tier = "conformance";
            v.measured = value;
            v.limit = limits.aclr_min_db;
            v.margin = value - limits.aclr_min_db;
            v.pass = value >= limits.aclr_min_db;
            out.push_back(v);
        }
    }
    if (evm) {
        const auto it = limits.evm_max_pct.find(tm.modulation);
        if (it == limits.evm_max_pct.end())
            throw ConfigError("no EVM limit configured for modulation order " +
                              std::to_string(tm.modulation));
        for (const auto& [tier_name, limit] :
             {std::pair<std::string, double>{"conformance", it->second.conformance_pct},
              {"minimum", it->second.minimum_pct}}) {
            Verdict v;
            v.test = "evm";
            v.tier = tier_name;
            v.measured = evm->rms_pct;
            v.limit = limit;
            v.margin = limit - evm->rms_pct;
            v.pass = evm->rms_pct <= limit;
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace rofso
