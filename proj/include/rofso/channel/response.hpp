// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rofso/errors.hpp"
#include "rofso/fir.hpp"
#include "rofso/signal.hpp"

namespace rofso {

/// Tabulated magnitude (and optional phase) response, e.g. a characterized
/// end-to-end link response. Frequencies must be strictly increasing;
/// beyond the table the response holds its edge values.
struct FrequencyResponse {
    struct Point {
        double freq_hz = 0.0;
        double mag_db = 0.0;
        std::optional<double> phase_deg;
    };
    std::vector<Point> points;

    void validate() const {
        if (points.size() < 2) throw FormatError("response table needs at least 2 points");
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (points[i].freq_hz <= points[i - 1].freq_hz)
                throw FormatError("response frequencies must be strictly increasing");
        }
    }

    double mag_db_at(double f_hz) const {
        if (f_hz <= points.front().freq_hz) return points.front().mag_db;
        if (f_hz >= points.back().freq_hz) return points.back().mag_db;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (f_hz <= points[i].freq_hz) {
                const auto& a = points[i - 1];
                const auto& b = points[i];
                const double t = (f_hz - a.freq_hz) / (b.freq_hz - a.freq_hz);
                return a.mag_db + t * (b.mag_db - a.mag_db);
            }
        }
        return points.back().mag_db;
    }

    double phase_rad_at(double f_hz) const {
        if (!points.front().phase_deg) return 0.0;
        auto deg = [&](const Point& p) { return p.phase_deg.value_or(0.0); };
        if (f_hz <= points.front().freq_hz) return deg(points.front()) * kPi / 180.0;
        if (f_hz >= points.back().freq_hz) return deg(points.back()) * kPi / 180.0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (f_hz <= points[i].freq_hz) {
                const auto& a = points[i - 1];
                const auto& b = points[i];
                const double t = (f_hz - a.freq_hz) / (b.freq_hz - a.freq_hz);
                return (deg(a) + t * (deg(b) - deg(a))) * kPi / 180.0;
            }
        }
        return deg(points.back()) * kPi / 180.0;
    }

    bool has_phase() const {
        return !points.empty() && points.front().phase_deg.has_value();
    }

    bool is_passive() const {
        return std::all_of(points.begin(), points.end(),
                           [](const Point& p) { return p.mag_db <= 0.0; });
    }
};

/// Single-pole lowpass magnitude table, the default detector model when no
/// measured response file is supplied.
inline FrequencyResponse single_pole_response(double f3db_hz, double f_max_hz,
                                              std::size_t n_points = 64) {
    FrequencyResponse r;
    r.points.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double f = static_cast<double>(i) * f_max_hz / static_cast<double>(n_points - 1);
        const double mag = -10.0 * std::log10(1.0 + (f / f3db_hz) * (f / f3db_hz));
        r.points.push_back({f, mag, std::nullopt});
    }
    return r;
}

/// CSV reader, header `freq_hz,mag_db[,phase_deg]`.
inline FrequencyResponse load_response_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open response file: " + path);
    FrequencyResponse r;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("freq_hz", 0) != 0)
                throw FormatError("response CSV must start with a freq_hz,mag_db header");
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        FrequencyResponse::Point p;
        if (!std::getline(ss, cell, ',')) throw FormatError("bad response row: " + line);
        p.freq_hz = std::stod(cell);
        if (!std::getline(ss, cell, ',')) throw FormatError("bad response row: " + line);
        p.mag_db = std::stod(cell);
        if (std::getline(ss, cell, ',')) p.phase_deg = std::stod(cell);
        r.points.push_back(p);
    }
    if (r.points.size() >= 2 && !std::is_sorted(r.points.begin(), r.points.end(),
                                                [](const auto& a, const auto& b) {
                                                    return a.freq_hz < b.freq_hz;
                                                })) {
        throw FormatError("response frequencies must be increasing: " + path);
    }
    r.validate();
    return r;
}

/// Linear-phase FIR realizing a measured magnitude response by frequency
/// sampling. Phase is folded in when the table provides it. Passive tables
/// (mag <= 0 dB everywhere) are renormalized so the realized peak gain
/// never exceeds unity.
inline std::vector<double> fir_from_measured_response(const FrequencyResponse& resp,
                                                      double rate_hz, std::size_t n_taps = 255) {
    resp.validate();
    if (n_taps % 2 == 0) ++n_taps;
    const std::size_t n = n_taps;
    const double mid = static_cast<double>(n - 1) / 2.0;

    std::vector<cplx> H(n);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) * rate_hz / static_cast<double>(n);
        const double mag = db_to_lin_amp(resp.mag_db_at(f));
        const double ph = resp.phase_rad_at(f) - 2.0 * kPi * static_cast<double>(k) * mid /
                                                    static_cast<double>(n);
        H[k] = mag * cplx{std::cos(ph), std::sin(ph)};
    }
    for (std::size_t k = n / 2 + 1; k < n; ++k) H[k] = std::conj(H[n - k]);

    std::vector<double> h(n);
    for (std::size_t m = 0; m < n; ++m) {
        cplx acc{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            const double a = 2.0 * kPi * static_cast<double>(k) * static_cast<double>(m) /
                             static_cast<double>(n);
            acc += H[k] * cplx{std::cos(a), std::sin(a)};
        }
        h[m] = acc.real() / static_cast<double>(n);
    }

    if (resp.is_passive()) {
        double peak = 0.0;
        for (int i = 0; i <= 2048; ++i) {
            const double f = 0.5 * static_cast<double>(i) / 2048.0;
            peak = std::max(peak, std::abs(fir_response(h, f)));
        }
        if (peak > 1.0) {
            for (auto& v : h) v /= peak;
        }
    }
    return h;
}

}  // namespace rofso
