// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rofso/errors.hpp"
#include "rofso/measure/evm.hpp"
#include "rofso/measure/psd.hpp"
#include "rofso/rx/equalize.hpp"
#include "rofso/test_model.hpp"

namespace rofso {

namespace detail {

inline std::ofstream open_csv(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    return f;
}

}  // namespace detail

inline void write_psd_csv(const PsdEstimate& psd, const std::string& path) {
    auto f = detail::open_csv(path);
    f << "freq_hz,psd_db\n";
    char line[64];
    for (std::size_t k = 0; k < psd.freq_hz.size(); ++k) {
        std::snprintf(line, sizeof(line), "%.1f,%.4f\n", psd.freq_hz[k], psd.db_rel(k));
        f << line;
    }
}

inline void write_constellation_csv(const GridMatrix& eq, const std::string& path) {
    auto f = detail::open_csv(path);
    f << "re,im,subcarrier,symbol\n";
    char line[96];
    for (std::size_t sym = 0; sym < eq.n_symbols; ++sym) {
        for (std::size_t sc = 0; sc < eq.n_subcarriers; ++sc) {
            const cplx v = eq.at(sym, sc);
            std::snprintf(line, sizeof(line), "%.8f,%.8f,%zu,%zu\n", v.real(), v.imag(), sc, sym);
            f << line;
        }
    }
}

inline void write_trace_csv(const std::vector<double>& index, const std::vector<double>& value,
                            const std::string& path) {
    auto f = detail::open_csv(path);
    f << "index,value\n";
    char line[64];
    for (std::size_t i = 0; i < index.size() && i < value.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.0f,%.6f\n", index[i], value[i]);
        f << line;
    }
}

inline void write_channel_estimate_csv(const ChannelEstimate& est, const std::string& path) {
    auto f = detail::open_csv(path);
    f << "subcarrier,re,im\n";
    char line[96];
    for (std::size_t sc = 0; sc < est.gain.size(); ++sc) {
        std::snprintf(line, sizeof(line), "%zu,%.10f,%.10f\n", sc, est.gain[sc].real(),
                      est.gain[sc].imag());
        f << line;
    }
}

inline void write_per_subcarrier_evm_csv(const EvmResult& evm, const std::string& path) {
    auto f = detail::open_csv(path);
    f << "subcarrier,evm_pct\n";
    char line[64];
    for (std::size_t sc = 0; sc < evm.per_subcarrier_pct.size(); ++sc) {
        std::snprintf(line, sizeof(line), "%zu,%.5f\n", sc, evm.per_subcarrier_pct[sc]);
        f << line;
    }
}

}  // namespace rofso
