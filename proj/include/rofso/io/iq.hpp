// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rofso/errors.hpp"
#include "rofso/signal.hpp"

namespace rofso {

/// Shared IQ file format: raw little-endian float32 samples, interleaved
/// I,Q for complex signals, plain sequence for real ones. Every data file
/// has a JSON sidecar carrying {kind, sample_rate_hz, carrier_hz, seed,
/// description}.
inline void write_iq(const SampledSignal& sig, const std::string& data_path,
                     const std::string& meta_path) {
    std::ofstream out(data_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + data_path);
    std::vector<float> buf;
    if (sig.is_real()) {
        buf.reserve(sig.size());
        for (double v : sig.re()) buf.push_back(static_cast<float>(v));
    } else {
        buf.reserve(2 * sig.size());
        for (const cplx& v : sig.cx()) {
            buf.push_back(static_cast<float>(v.real()));
            buf.push_back(static_cast<float>(v.imag()));
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw IoError("short write to " + data_path);

    nlohmann::ordered_json meta;
    meta["kind"] = sig.is_real() ? "real" : "complex";
    meta["sample_rate_hz"] = sig.rate_hz();
    if (sig.meta.carrier_hz > 0.0) meta["carrier_hz"] = sig.meta.carrier_hz;
    meta["seed"] = sig.meta.seed;
    meta["description"] = sig.meta.description;
    std::ofstream mf(meta_path);
    if (!mf) throw IoError("cannot write " + meta_path);
    mf << meta.dump(2) << "\n";
}

inline SampledSignal read_iq(const std::string& data_path, const std::string& meta_path) {
    std::ifstream mf(meta_path);
    if (!mf) throw IoError("cannot open " + meta_path);
    nlohmann::json meta;
    try {
        mf >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad IQ sidecar " + meta_path + ": " + e.what());
    }
    if (!meta.contains("kind") || !meta.contains("sample_rate_hz"))
        throw FormatError("IQ sidecar missing kind/sample_rate_hz: " + meta_path);
    const std::string kind = meta["kind"];
    const double rate = meta["sample_rate_hz"];

    std::ifstream in(data_path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open " + data_path);
    const std::streamsize bytes = in.tellg();
    in.seekg(0);
    if (bytes % sizeof(float) != 0) throw FormatError("IQ file size not float-aligned");
    std::vector<float> buf(static_cast<std::size_t>(bytes) / sizeof(float));
    in.read(reinterpret_cast<char*>(buf.data()), bytes);
    if (!in) throw IoError("short read from " + data_path);

    SampledSignal sig;
    if (kind == "real") {
        std::vector<double> x(buf.size());
        for (std::size_t i = 0; i < buf.size(); ++i) x[i] = buf[i];
        sig = SampledSignal::real(std::move(x), rate);
    } else if (kind == "complex") {
        if (buf.size() % 2 != 0) throw FormatError("complex IQ file has odd float count");
        std::vector<cplx> x(buf.size() / 2);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = {buf[2 * i], buf[2 * i + 1]};
        sig = SampledSignal::complex(std::move(x), rate);
    } else {
        throw FormatError("unknown IQ kind: " + kind);
    }
    if (meta.contains("carrier_hz")) sig.meta.carrier_hz = meta["carrier_hz"];
    if (meta.contains("seed")) sig.meta.seed = meta["seed"];
    if (meta.contains("description")) sig.meta.description = meta["description"];
    return sig;
}

}  // namespace rofso
