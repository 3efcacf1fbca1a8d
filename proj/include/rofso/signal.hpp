// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rofso/errors.hpp"

namespace rofso {

using cplx = std::complex<double>;

inline double db_to_lin_pow(double db) { return std::pow(10.0, db / 10.0); }
inline double db_to_lin_amp(double db) { return std::pow(10.0, db / 20.0); }
inline double lin_pow_to_db(double p) { return 10.0 * std::log10(p); }

constexpr double kPi = 3.14159265358979323846;
constexpr double kBoltzmann = 1.380649e-23;  // J/K

/// Per-stage power bookkeeping, carried through a channel chain for the report.
struct StagePower {
    std::string stage;
    double power = 0.0;
};

struct SignalMeta {
    double carrier_hz = 0.0;  // 0 = unset / baseband
    std::uint64_t seed = 0;
    std::string description;
    std::vector<std::string> history;
    std::vector<StagePower> stage_powers;
};

/// Real or complex sample stream with its sample rate. Real signals keep only
/// the `re` buffer; complex signals keep only `cx`. All DSP runs in double,
/// file I/O converts to float32 at the boundary.
class SampledSignal {
  public:
    enum class Kind { Real, Complex };

    SampledSignal() = default;

    static SampledSignal real(std::vector<double> samples, double rate_hz) {
        if (rate_hz <= 0.0) throw ConfigError("sample rate must be positive");
        SampledSignal s;
        s.kind_ = Kind::Real;
        s.rate_hz_ = rate_hz;
        s.re_ = std::move(samples);
        return s;
    }

    static SampledSignal complex(std::vector<cplx> samples, double rate_hz) {
        if (rate_hz <= 0.0) throw ConfigError("sample rate must be positive");
        SampledSignal s;
        s.kind_ = Kind::Complex;
        s.rate_hz_ = rate_hz;
        s.cx_ = std::move(samples);
        return s;
    }

    Kind kind() const { return kind_; }
    bool is_real() const { return kind_ == Kind::Real; }
    double rate_hz() const { return rate_hz_; }

    std::size_t size() const { return is_real() ? re_.size() : cx_.size(); }

    std::vector<double>& re() {
        if (!is_real()) throw InputError("expected a real signal");
        return re_;
    }
    const std::vector<double>& re() const {
        if (!is_real()) throw InputError("expected a real signal");
        return re_;
    }
    std::vector<cplx>& cx() {
        if (is_real()) throw InputError("expected a complex signal");
        return cx_;
    }
    const std::vector<cplx>& cx() const {
        if (is_real()) throw InputError("expected a complex signal");
        return cx_;
    }

    double mean_power() const {
        double acc = 0.0;
        if (is_real()) {
            for (double v : re_) acc += v * v;
        } else {
            for (const cplx& v : cx_) acc += std::norm(v);
        }
        return size() ? acc / static_cast<double>(size()) : 0.0;
    }

    double peak_power() const {
        double peak = 0.0;
        if (is_real()) {
            for (double v : re_) peak = std::max(peak, v * v);
        } else {
            for (const cplx& v : cx_) peak = std::max(peak, std::norm(v));
        }
        return peak;
    }

    double rms() const { return std::sqrt(mean_power()); }

    double papr_db() const {
        double mp = mean_power();
        if (mp <= 0.0) throw InputError("PAPR of a zero signal is undefined");
        return lin_pow_to_db(peak_power() / mp);
    }

    SignalMeta meta;

  private:
    Kind kind_ = Kind::Real;
    double rate_hz_ = 1.0;
    std::vector<double> re_;
    std::vector<cplx> cx_;
};

}  // namespace rofso
